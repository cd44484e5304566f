"""
Rotation polytope of a locally constant potential
=================================================

The rotation set is the hull of simple-cycle means in the block graph.  We
compare the exact hull with the inner/outer sandwich from support queries and
with the hull of Birkhoff means of short periodic words, then draw all three.
"""

import sys
from pathlib import Path

import numpy as np

from rotset import TablePotential, full_shift, rotation_polytope, support
from rotset.acceptance import brute_force_hull
from rotset.geometry import hausdorff
from rotset.rotgeom import approximate_rotation_polytope
from rotset.svg import Figure

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

sft = full_shift(3)
rng = np.random.default_rng(7)
entries = {a + b: rng.uniform(-1, 1, size=2).round(3).tolist() for a in "012" for b in "012"}
phi = TablePotential.from_mapping(sft, 2, entries)

exact = rotation_polytope(sft, phi)
print(f"{len(exact.vertices)} vertices")
for v, word in zip(exact.vertices, exact.cycles):
    print(f"  {np.round(v, 4)}  generated by the cyclic word {''.join(map(str, word))}")

# support function = maximum cycle mean
for u in ([1, 0], [0, 1], [-1, -1]):
    q = support(sft, phi, u)
    print(f"h({u}) = {q.value:+.6f}  (polytope {exact.support(u):+.6f})")

approx = approximate_rotation_polytope(sft, phi, n_directions=16)
print(f"\n16-direction sandwich: certified gap {approx.certified_gap:.4f}, "
      f"true gap {hausdorff(exact.as_hull(), approx.as_hull()):.4f}")

words = brute_force_hull(sft, phi, 6)
print(f"cyclic words up to length 6 miss the hull by {hausdorff(words, exact.as_hull()):.2e}")

fig = Figure()
fig.polygon(approx.outer.vertices, stroke="#999999")
fig.polygon(exact.vertices, stroke="#2980b9", fill="#d6eaf8", opacity=0.7)
fig.polygon(approx.vertices, stroke="#c0392b")
fig.points(phi.values, color="black", r=2)
fig.save(out / "rotation_polytope.svg")
print(f"wrote {out / 'rotation_polytope.svg'}")
