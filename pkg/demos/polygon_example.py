"""
The polygon example
===================

Six symbols in three houses; long runs inside one house push the potential
from w0 toward that house's vertex.  Interior rotation vectors have entropy
above log 2, and the maximal-entropy measure sits at w0.
"""

import math
import sys
from pathlib import Path

import numpy as np

from rotset.gallery import (Example2Potential, Example2Spec, build_example2, check_lipschitz,
                            lipschitz_bound)
from rotset.svg import Figure
from rotset.thermo import ThermoSystem, level_curve, solve_rotation

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

spec = Example2Spec(K=5)          # 1296 states; K=7 is the full-size system
p = Example2Potential(spec)
print("value on 0002...   ", p.evaluate((0, 0, 0, 2)).value)        # run = alpha: still w0
print("value on 00012...  ", p.evaluate((0, 0, 0, 1, 2)).value)
ev = p.evaluate((0,) * 7)                                        # run not finished
print("value on 0000000   ", ev.value, "+/-", ev.error_bound)

# agreeing on alpha symbols is not enough to be close
pair = ((0, 0, 0, 2), (0, 0, 0, 1, 1, 1, 2))
print(f"\nLipschitz ratio of {pair}: {check_lipschitz(spec, [pair]):.3f}"
      f"  (bound {lipschitz_bound(spec):.3f}, diam*2^alpha = {spec.diameter() * 8:.3f})")

sft, table, bound = build_example2(spec)
system = ThermoSystem(sft, table)
print(f"\nrv of the Bernoulli measure: {system.grad([0, 0])}")
print(f"truncation error of the table: {bound.sup_error}")

for t in (0.0, 0.5, 0.9, 0.97):
    w = spec.w0 + t * (spec.vertices[0] - spec.w0)
    sol = solve_rotation(sft, table, w)
    print(f"H at {t:.2f} of the way to w1: {sol.H:.5f}   (log 2 = {math.log(2):.5f})")

fig = Figure()
fig.polygon(spec.vertices, stroke="black")
for R, colour in ((0.5, "#c0392b"), (1.0, "#d35400"), (2.0, "#27ae60"), (4.0, "#2980b9")):
    fig.polyline(level_curve(sft, table, R, 96), stroke=colour, closed=True)
fig.points([spec.w0])
fig.save(out / "polygon_levels.svg")
print(f"wrote {out / 'polygon_levels.svg'}")
