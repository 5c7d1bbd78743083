import math
from fractions import Fraction

import numpy as np
import pytest

from llab.empirical import (
    Constant,
    IndicatorXEps,
    SystoleBins,
    Triangle,
    boundary_cell_fraction,
    discrete_empirical,
    escape_fraction,
    escape_fraction_from_state,
    observable_average,
    union_area_bound,
)
from llab.excursions import all_excursions
from llab.lattice import LatticeState, apply_flow, systole, tau_lattice
from llab.realnum import InputError, Surd

SQRT2, SQRT3 = Surd(0, 1, 1, 2), Surd(0, 1, 1, 3)
Z3 = LatticeState.from_basis(np.eye(3))


def test_no_triangles():
    b = union_area_bound([], 3.0)
    assert (b.lower, b.upper) == (0.0, 0.0)


def test_single_triangle_converges_to_closed_form():
    T, leg = 4.0, 1.7
    tri = Triangle(2.5, 3.0, 5.5 - leg)
    exact = leg ** 2 / 2 / T ** 2
    prev = None
    for depth in (4, 7, 10, 13):
        b = union_area_bound([tri], T, depth)
        assert b.lower <= exact <= b.upper
        assert b.upper - b.lower == pytest.approx(b.unresolved_area / T ** 2)
        if prev is not None:
            assert b.lower >= prev.lower and b.upper <= prev.upper
        prev = b
    assert prev.upper - prev.lower < 2e-3


def test_diagonal_family_escape():
    b = escape_fraction_from_state(Z3, math.exp(-1), 2.0, 12)
    assert b.lower <= 0.875 <= b.upper
    assert b.upper - b.lower < 1e-3


def test_subadditivity():
    exc = all_excursions(SQRT2, SQRT3, Fraction(3, 10), 8)
    b = union_area_bound(exc, 8.0, 10)
    # every triangle inside the square here, so each area is leg^2 / 2
    areas = sum(min(e.leg, 8) ** 2 / 2 for e in exc)
    assert areas / 64 >= b.lower


def test_escape_fraction_vs_monte_carlo():
    from scipy.stats import qmc

    eps, T = Fraction(3, 10), 4.0
    b = escape_fraction(SQRT2, SQRT3, eps, T, 12)
    pts = qmc.Halton(d=2, scramble=True, seed=5).random(2000) * T
    base = tau_lattice(SQRT2, SQRT3)
    hits = sum(systole(apply_flow(base, (float(s), float(t)))).value <= 0.3 for s, t in pts)
    p = hits / len(pts)
    sigma = math.sqrt(max(p * (1 - p), 1e-4) / len(pts))
    assert b.lower - 3 * sigma <= p <= b.upper + 3 * sigma


def test_escape_fraction_refusal():
    with pytest.raises(InputError):
        escape_fraction(SQRT2, SQRT3, Fraction(3, 10), 15)


def test_constant_average():
    avg = observable_average(SQRT2, SQRT3, 2.0, 0.5, Constant())
    assert avg.masses == (1.0,) and avg.mean == 1.0 and avg.delta == 0.0


def test_indicator_average_within_bounds():
    eps, T, h = Fraction(3, 10), 4.0, 0.1
    avg = observable_average(SQRT2, SQRT3, T, h, IndicatorXEps(eps), diagnose=False)
    exc = all_excursions(SQRT2, SQRT3, eps, T)
    b = union_area_bound(exc, T, 12)
    delta = boundary_cell_fraction(exc, T, avg.cells)
    assert b.lower - delta <= avg.mean <= b.upper + delta


def test_small_T_all_mass_on_top_bin():
    avg = observable_average(SQRT2, SQRT3, 0.2, 0.1, SystoleBins([0.05, 0.1, 0.2]))
    # systole of tau Z^3 is about 0.41, above every threshold
    assert avg.masses[-1] == 1.0


def test_grid_refusal():
    with pytest.raises(InputError):
        observable_average(SQRT2, SQRT3, 20.0, 1e-3, Constant())


def test_discrete_point_mass():
    g = discrete_empirical(tau_lattice(SQRT2, SQRT3), 1, SystoleBins([0.1, 0.2]))
    assert g.distribution == (0, 0, 1)


def test_discrete_matches_direct_and_rows_average():
    obs = SystoleBins([Fraction(1, 10), Fraction(1, 5), Fraction(3, 10)])
    x0 = tau_lattice(SQRT2, SQRT3)
    g = discrete_empirical(x0, 12, obs)
    for n in (0, 5, 11):
        for m in (0, 6, 11):
            v = systole(apply_flow(x0, (m, n))).value
            expect = sum(v > r for r in (0.1, 0.2, 0.3))
            assert g.bins[n][m] == expect
    rows = g.row_distributions
    mean = tuple(sum(r[i] for r in rows) / len(rows) for i in range(len(g.labels)))
    assert mean == g.distribution
    assert sum(g.distribution) == 1


def test_discrete_precision_refusal():
    with pytest.raises(InputError):
        discrete_empirical(tau_lattice(SQRT2, SQRT3), 40, Constant())
