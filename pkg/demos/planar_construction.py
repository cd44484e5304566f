"""
A potential with a prescribed planar rotation set
=================================================

Each stage doubles the number of equidistant boundary points and lengthens
the cylinders they live on (1, 3, 27, 729).  Stage certificates bound the sup
distance between consecutive stages and the distance between each boundary
point and the rotation vector of its generating orbit.
"""

import sys
from pathlib import Path

import numpy as np

from rotset import circle, construct, export_stage, full_shift, make_boundary, rotation_polytope
from rotset.construct2d import stage_targets
from rotset.svg import Figure

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

K = make_boundary({"type": "polyline", "vertices": [[0, 0], [3, 0], [4, 2], [1.5, 3.5], [-1, 2]]})
state, certs = construct(K, 3)
print(" n   sup diff   bound     defect     bound     overrides")
for c in certs:
    print(f" {c.stage}   {c.sup_diff:.5f}   {c.sup_bound:.5f}   {c.defects:.2e}   "
          f"{c.defect_bound:.2e}   {c.n_overrides}")

# stage 1 as an ordinary depth-3 table
stage1 = state.chain()[1]
poly = rotation_polytope(full_shift(2), export_stage(stage1))
print(f"\nRot(stage 1) has {len(poly.vertices)} vertices; "
      f"Hausdorff distance to K = {K.hausdorff_to(poly.vertices):.4f}")

# later stages from the closed-form chain
for n in range(7):
    pts, targets = stage_targets(K, n)
    print(f"stage {n}: {len(pts):3d} points, d_H(targets, K) = {K.hausdorff_to(targets):.5f}")

# the all-zero orbit moves left by 1/8, 1/16, 1/32 of the perimeter
print("\nposition of 000... by stage:", [str(s.position_of(bytes(s.m))) for s in state.chain()])

fig = Figure()
fig.polyline(np.array([K.point_at(t) for t in np.linspace(0, 1, 200)]), closed=True)
fig.polygon(poly.vertices, stroke="#2980b9", fill="#d6eaf8", opacity=0.6)
fig.points(state.points(), color="#c0392b", r=1.5)
fig.points(state.targets(), color="#27ae60", r=1)
fig.save(out / "construction.svg")

disk = circle()
_, certs = construct(disk, 3)
print("circle certificates ok:", all(c.ok for c in certs))
