"""How fast does n<n alpha><n beta> approach zero?

Counts near-solutions for a quadratic pair and a cubic pair, then prints the
running minimum at a few checkpoints.
"""
from fractions import Fraction

from llab import count_below, running_min_trace
from llab.realnum import Surd, real_root_decimal

sqrt2, sqrt3 = Surd(0, 1, 1, 2), Surd(0, 1, 1, 3)
theta = real_root_decimal([1, 0, -1, -1], 1.32)
theta2 = real_root_decimal([1, -2, 1, -1], 1.75)

for eps in (Fraction(1, 10), Fraction(1, 20), Fraction(1, 50)):
    rep = count_below(sqrt2, sqrt3, eps, 10 ** 6)
    print(f"sqrt2, sqrt3: {rep.count:4d} n <= 1e6 with value < {eps}")

for name, (a, b) in {"sqrt2, sqrt3": (sqrt2, sqrt3), "theta, theta^2": (theta, theta2)}.items():
    print(name)
    for cp, n, iv in running_min_trace(a, b, 10 ** 6, [10, 10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5]):
        print(f"  up to {cp:>8}: min {float(iv.hi):.3e} at n = {n}")
