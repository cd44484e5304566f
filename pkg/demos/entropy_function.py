"""
Entropy of a rotation vector
============================

Full 2-shift with phi(0) = 0, phi(1) = 1.  The rotation vector of a measure
is the frequency of the symbol 1, and the entropy function is the binary
entropy.  Pressure, Legendre dual and Newton solve reproduce it.
"""

import math

import numpy as np

from rotset import TablePotential, entropy_profile, full_shift, golden_mean, solve_rotation
from rotset.thermo import ThermoSystem

sft = full_shift(2)
phi = TablePotential.from_mapping(sft, 1, {"0": [0], "1": [1]})

# Q(t) = log(1 + e^t)
system = ThermoSystem(sft, phi)
for t in (-5, 0, 2.5):
    print(f"Q({t:+}) = {system.Q([t]):.12f}   closed form {math.log1p(math.exp(t)):.12f}")

# H(w) by Newton on grad Q(T) = w
grid = [[w] for w in np.linspace(0.05, 0.95, 10)]
print("\n    w        H(w)      -w log w - (1-w) log(1-w)    T*")
for sol in entropy_profile(sft, phi, grid):
    w = sol.w[0]
    exact = -w * math.log(w) - (1 - w) * math.log(1 - w)
    print(f"  {w:.2f}   {sol.H:.10f}   {exact:.10f}           {sol.T[0]:+.4f}")

# close to the boundary |T*| grows like log(w / (1 - w))
sol = solve_rotation(sft, phi, [0.999])
print(f"\nw = 0.999: H = {sol.H:.6f}, T* = {sol.T[0]:.3f}, {sol.iterations} Newton steps")

# on the golden-mean shift the symbol 1 can occupy at most half the places
gm = golden_mean()
ind = TablePotential.from_mapping(gm, 1, {"0": [0], "1": [1]})
top = ThermoSystem(gm, ind).grad([0.0])[0]
print(f"golden mean: maximal-entropy frequency of 1 = {top:.6f}"
      f" (1/(phi+2) = {1 / ((1 + math.sqrt(5)) / 2 + 2):.6f})")
for w in (0.1, top, 0.45, 0.499):
    print(f"  H({w:.4f}) = {solve_rotation(gm, ind, [w]).H:.6f}")
