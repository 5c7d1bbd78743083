"""Cusp excursions of the orbit a_{s,t} tau_{alpha,beta} Z^3.

Lists the excursion triangles in [0, T]^2, bounds the fraction of the square
spent in the cusp, runs the escape-of-mass implication check and writes an
SVG picture next to this script.
"""
from fractions import Fraction
from pathlib import Path

from llab import all_excursions, escape_fraction, verify_cusp_proposition
from llab.excursions import project
from llab.output import atomic_write, emit_svg
from llab.realnum import CF, Surd

eps, T = Fraction(3, 10), 8.0
sqrt2, sqrt3 = Surd(0, 1, 1, 2), Surd(0, 1, 1, 3)

exc = all_excursions(sqrt2, sqrt3, eps, T)
for e in exc:
    lo, hi = project(e, T)
    print(f"n = {e.n:>8}  leg = {e.leg:.4f}  s+t in [{lo:.3f}, {hi:.3f}]")

b = escape_fraction(sqrt2, sqrt3, eps, T, depth=12)
print(f"time in X_eps: [{b.lower:.5f}, {b.upper:.5f}] of the square")

out = Path(__file__).with_name("excursions.svg")
atomic_write(out, emit_svg(exc, T))
print(f"wrote {out.name}")

# a Liouville-type pair spends much longer in the cusp
liou = CF((0, 1, 100, 10000), (1,))
rep = verify_cusp_proposition(liou, liou, Fraction(1, 5), 6, 0.3)
print(f"Liouville pair: escape {rep.escape[0]:.3f}.., count {rep.count}, status {rep.status}")
for c in rep.checks:
    print(f"  {c.name}: {c.status}")
