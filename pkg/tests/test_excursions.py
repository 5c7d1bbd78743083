import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from llab.excursions import (
    Excursion,
    IntervalSet,
    all_excursions,
    clipped_polygon,
    equivalence_classes,
    excursion_for,
    excursion_leg,
    lambda_set,
    maximal_intervals,
    project,
    project_by_vertices,
    uniqueness_check,
    uniqueness_scan,
    verify_cover_identity,
    verify_cusp_proposition,
)
from llab.realnum import CF, InputError, Interval, Rational, Surd

from oracles import clipped_max_sum, hp, littlewood, union_length

SQRT2, SQRT3 = Surd(0, 1, 1, 2), Surd(0, 1, 1, 3)
LIOUVILLE = CF((0, 1, 100, 10000), (1,))


def _tri(s_max, t_max, hyp, n=1):
    iv = Interval(Fraction(1, 10), Fraction(1, 10))
    return Excursion(n, 0, 0, iv, iv, Fraction(1, 5), s_max, t_max, hyp)


def test_no_triangle_above_threshold():
    # 169 <169 sqrt2><169 sqrt3> = 0.1002 > 0.3^3
    assert excursion_for(169, SQRT2, SQRT3, Fraction(3, 10), 10) is None


def test_leg_length_at_convergent():
    lo, hi = excursion_leg(169, SQRT2, SQRT3, Fraction(1, 2))
    assert lo == pytest.approx(0.22112309594183683, abs=1e-14)
    assert hi - lo < 1e-14


def test_hypotenuse_beyond_square():
    # n = 10864 is an excursion at eps = 0.3 but log(n / eps) = 10.5 > 2T
    assert excursion_for(10864, SQRT2, SQRT3, Fraction(3, 10), 8) is not None
    assert excursion_for(10864, SQRT2, SQRT3, Fraction(3, 10), 5) is None


def test_excursion_fields():
    e = excursion_for(41, SQRT2, SQRT3, Fraction(3, 10), 8)
    assert (e.m1, e.m2) == (-58, -71)
    assert e.hyp == pytest.approx(math.log(41 / 0.3), rel=1e-15)
    assert e.s_max == pytest.approx(math.log(0.3 / float(e.r1.mid)), rel=1e-14)
    assert e.leg == pytest.approx(math.log(0.027 / float(littlewood(41, hp("sqrt2"), hp("sqrt3")))), rel=1e-12)


def test_rational_inputs_rejected():
    with pytest.raises(InputError):
        excursion_for(1, Rational(0), SQRT3, Fraction(1, 10), 3)
    with pytest.raises(InputError):
        verify_cusp_proposition(Rational(0), Rational(0), Fraction(1, 10), 3, 0.2)


def test_uniqueness_examples():
    assert uniqueness_check(1, SQRT2, SQRT3, Fraction(1, 10), 5) == 0
    assert uniqueness_check(169, SQRT2, SQRT3, Fraction(9, 20), 10) <= 1
    assert uniqueness_check(41, SQRT2, SQRT3, Fraction(3, 10), 8) == 1


def test_uniqueness_scan_small():
    best, bad = uniqueness_scan(SQRT2, SQRT3, Fraction(3, 10), 8, 5000)
    assert best == 1 and bad == []
    assert max(uniqueness_check(n, SQRT2, SQRT3, Fraction(3, 10), 8) for n in range(1, 300)) <= 1


def test_liouville_excursions_are_near_solutions():
    exc = all_excursions(LIOUVILLE, LIOUVILLE, Fraction(3, 10), 6)
    assert exc
    with mpmath.workdps(60):
        x = 1 / (1 + 1 / (100 + 1 / (10000 + 1 / ((1 + mpmath.sqrt(5)) / 2))))
    for e in exc:
        assert littlewood(e.n, x, x) <= hp(Fraction(27, 1000))
    assert [e.n for e in exc] == sorted(e.n for e in exc)


def test_swap_reflects_triangles():
    eps, T = Fraction(3, 10), 8
    a = all_excursions(SQRT2, SQRT3, eps, T)
    b = all_excursions(SQRT3, SQRT2, eps, T)
    assert [e.n for e in a] == [e.n for e in b]
    for x, y in zip(a, b):
        r = y.reflect()
        assert (r.m1, r.m2) == (x.m1, x.m2)
        assert r.s_max == pytest.approx(x.s_max, rel=1e-14)
        assert r.t_max == pytest.approx(x.t_max, rel=1e-14)


def test_projection_closed_forms():
    T = 5.0
    inner = _tri(3.0, 3.5, 5.0)
    assert project(inner, T) == (5.0, 6.5)
    assert project(_tri(7.0, 2.0, 6.0), T) == (6.0, 7.0)  # clipped by s <= T
    assert project(_tri(2.0, 2.0, 4.0), T) == (4.0, 4.0)  # leg 0


def test_projection_against_lp_oracle():
    rng = np.random.default_rng(3)
    T = 6.0
    checked = 0
    for _ in range(300):
        s, t = rng.uniform(-1, 9, size=2)
        h = rng.uniform(-1, s + t)
        e = _tri(s, t, h)
        if min(s, T) + min(t, T) < h or min(s, t) < 0:
            with pytest.raises(InputError):
                project(e, T)
            continue
        lo, hi = project(e, T)
        assert hi == pytest.approx(clipped_max_sum(s, t, h, T), abs=1e-9)
        vlo, vhi = project_by_vertices(e, T)
        assert vhi == pytest.approx(hi, abs=1e-9)
        if h >= 0:
            assert vlo == pytest.approx(lo, abs=1e-9)
        assert 3 <= len(clipped_polygon(e, T)) <= 7
        checked += 1
    assert checked > 100


def test_maximal_intervals_examples():
    keys, union, dups = maximal_intervals([(1, 0, 2), (2, 0.5, 1.5), (3, 1, 3)])
    assert keys == [1, 3] and union.length == 3
    keys, _, _ = maximal_intervals([(1, 0, 1), (2, 2, 3), (3, 4, 5)])
    assert keys == [1, 2, 3]
    keys, _, dups = maximal_intervals([(5, 0, 1), (3, 0, 1)])
    assert keys == [3] and dups == [5]
    keys, _, _ = maximal_intervals([(1, 0, 0), (2, 1, 2)])
    assert keys == [2]


def test_maximal_intervals_random_union():
    rng = np.random.default_rng(11)
    lo = rng.uniform(0, 100, 1000)
    iv = [(i, a, a + w) for i, (a, w) in enumerate(zip(lo, rng.exponential(1.0, 1000)))]
    keys, union, _ = maximal_intervals(iv)
    assert union.length == pytest.approx(union_length([(a, b) for _, a, b in iv]), abs=1e-12)
    kept = {k for k in keys}
    for k, a, b in iv:
        if k not in kept:
            assert any(a2 <= a and b <= b2 for k2, a2, b2 in iv if k2 in kept)


def test_interval_set():
    s = IntervalSet([(3, 4), (0, 1), (0.5, 2)])
    assert list(s) == [(0, 2), (3, 4)] and s.length == 3 and 3.5 in s


def test_lambda_set():
    assert lambda_set(9, 1.0) == [9]
    assert lambda_set(5, 3 * math.log(2)) == [5, 10]
    assert lambda_set(7, 6.3) == [7, 14, 28, 56]
    with pytest.raises(InputError):
        lambda_set(3, 0)


def test_equivalence_classes():
    single = equivalence_classes({3: (0.0, 1.0), 5: (2.0, 3.0)}, Fraction(1, 5))
    assert sorted(c.members for c in single) == [[3], [5]]
    eps = Fraction(1, 5)
    n = 10
    h1 = math.log(n / 0.2)
    h2 = math.log(2 * n / 0.2)
    xi = {n: (h1, h1 + 2.5), 2 * n: (h2, h2 + 2.5)}
    cls = equivalence_classes(xi, eps)
    assert len(cls) == 1
    c = cls[0]
    assert c.members == [10, 20] and c.exponents == [0, 1] and not c.violations
    assert c.lambda_union == [n << p for p in range(len(c.lambda_union))]


def test_cusp_hypothesis_not_met():
    r = verify_cusp_proposition(SQRT2, SQRT3, Fraction(1, 10), 4, 0.2)
    assert r.status == "hypothesis not met"


def test_cusp_liouville_pass():
    r = verify_cusp_proposition(LIOUVILLE, LIOUVILLE, Fraction(1, 5), 6, 0.3)
    assert r.status == "pass"
    assert r.escape[0] >= 0.3
    assert r.count >= 0.3 * 6 / (3 * math.log(2))


def test_cusp_inconclusive():
    r = verify_cusp_proposition(SQRT2, SQRT3, Fraction(3, 10), 8, 0.015)
    assert r.escape[0] < 0.015 <= r.escape[1]
    assert r.status == "inconclusive"


def test_cover_identity_small():
    rep = verify_cover_identity(SQRT2, SQRT3, Fraction(3, 10), 5, samples=400, seed=1)
    assert rep.status == "pass" and rep.compared + rep.excluded + rep.boundary == 400
