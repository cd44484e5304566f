"""
Counting periodic orbits by rotation vector
===========================================

Per_n(w, r) counts points of period n whose rotation vector lies in the open
ball D(w, r).  Its growth rate is the largest entropy over the ball, which for
a ball off the maximal-entropy point is strictly more than H(w).
"""

import math
from fractions import Fraction

from rotset import TablePotential, census, count_in_ball, full_shift, h_per, h_word, per_count

sft = full_shift(2)
phi = TablePotential.from_mapping(sft, 1, {"0": [0], "1": [1]})


def H(w):
    return -w * math.log(w) - (1 - w) * math.log(1 - w)


print("census of period 6 by frequency of 1:")
for cell, count in census(sft, phi, 6, q=Fraction(1, 6)).bins.items():
    print(f"  {cell[0]}/6: {count}")
print("total", per_count(sft, 6))

print("\nball counts, w = 1/2, r = 0.1")
for n in (4, 10, 16, 22):
    print(f"  n={n:2d}: {count_in_ball(sft, phi, [0.5], 0.1, n).count}")

ns = range(2, 23)
for w, r in ((0.5, 0.1), (0.9, 0.1), (0.9, 0.05)):
    g = h_per(sft, phi, [w], r, ns)
    nearest = min(max(0.5, w - r), w + r)      # H peaks at 1/2
    hw = h_word(sft, phi, [w], r, ns).estimate
    print(f"w={w}, r={r}: h_per = {g.estimate:.4f}  h_word = {hw:.4f}"
          f"   H(w) = {H(w):.4f}   sup of H over the ball = {H(nearest):.4f}")
