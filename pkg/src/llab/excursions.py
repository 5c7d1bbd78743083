"""Cusp excursions of the orbit ``a_{s,t} tau_{alpha,beta} Z^3``.

For each ``n >= 1`` the flow times at which the vector with coordinates
``(n, m1, m2)`` is eps-short form the closed triangle

    s <= log(eps / r1),   t <= log(eps / r2),   s + t >= log(n / eps),

with ``r1 = |n alpha + m1|`` and ``r2 = |n beta + m2|``: an isosceles right
triangle whose legs have length ``log(eps^3 / (n r1 r2))``.  This module
builds those triangles, projects them by ``(s, t) -> s + t``, extracts the
inclusion-maximal projections, groups them by doubling, and checks the
counting chain that turns cusp time into near-solutions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

import mpmath
import numpy as np

from .counting import MAX_N, count_below, count_limit
from .lattice import apply_flow, as_spec, in_X_eps, tau_lattice
from .realnum import (FracStream, InputError, Interval, RealSpec, compare_littlewood, eval_interval,
                      littlewood_value, nearest_integer)

__all__ = [
    "Excursion",
    "IntervalSet",
    "ExcursionClass",
    "CheckRecord",
    "CuspReport",
    "excursion_for",
    "excursion_leg",
    "uniqueness_check",
    "uniqueness_scan",
    "all_excursions",
    "clipped_polygon",
    "project",
    "project_by_vertices",
    "maximal_intervals",
    "lambda_set",
    "equivalence_classes",
    "verify_cusp_proposition",
    "verify_cover_identity",
]

LOG2 = math.log(2)
# relative slack on float geometry derived from certified enclosures
GEOM_TOL = 1e-12


def _log(x: Fraction) -> float:
    with mpmath.workprec(80):
        return float(mpmath.log(mpmath.mpf(x.numerator) / x.denominator))


def _log_bounds(num: Fraction, den: Interval) -> tuple[float, float]:
    """Enclosure of ``log(num / den)``; ``+inf`` when ``den`` may be zero."""
    hi = math.inf if den.lo == 0 else _log(num / den.lo)
    lo = math.inf if den.hi == 0 else _log(num / den.hi)
    return lo, hi


@dataclass(frozen=True)
class Excursion:
    """The triangle ``d_{eps,n}`` for one ``n`` (and its companions m1, m2)."""

    n: int
    m1: int
    m2: int
    r1: Interval
    r2: Interval
    eps: Fraction
    s_max: float
    t_max: float
    hyp: float
    slack: float = 0.0
    boundary: bool = False

    @property
    def leg(self) -> float:
        return self.s_max + self.t_max - self.hyp

    def contains(self, s: float, t: float) -> bool:
        return s <= self.s_max and t <= self.t_max and s + t >= self.hyp

    def boundary_distance(self, s: float, t: float) -> float:
        """Distance from ``(s, t)`` to the nearest of the three edge lines."""
        return min(abs(s - self.s_max), abs(t - self.t_max), abs(s + t - self.hyp) / math.sqrt(2))

    def reflect(self) -> "Excursion":
        return Excursion(self.n, self.m2, self.m1, self.r2, self.r1, self.eps, self.t_max,
                         self.s_max, self.hyp, self.slack, self.boundary)


class IntervalSet:
    """Finite union of closed intervals, stored sorted and disjoint.

    >>> IntervalSet([(0, 2), (1, 3), (5, 6)])
    IntervalSet([(0, 3), (5, 6)])
    >>> IntervalSet([(0, 2), (1, 3), (5, 6)]).length
    4
    """

    def __init__(self, intervals=()):
        merged: list[list] = []
        for a, b in sorted((a, b) for a, b in intervals if a <= b):
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        self.intervals = [(a, b) for a, b in merged]

    @property
    def length(self):
        return sum(b - a for a, b in self.intervals)

    def __contains__(self, x) -> bool:
        return any(a <= x <= b for a, b in self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def __repr__(self):
        return f"IntervalSet({self.intervals!r})"


def _require_irrational(alpha: RealSpec, beta: RealSpec):
    if alpha.is_rational or beta.is_rational:
        raise InputError("alpha and beta must be irrational")


def _check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise InputError("eps must lie in (0, 1/2)")
    return eps


def _meets_square(s_max: float, t_max: float, hyp: float, T: float, tol: float) -> bool | None:
    """Whether ``{s <= s_max, t <= t_max, s+t >= hyp}`` meets ``[0, T]^2``.

    ``None`` when the answer changes within ``tol``.
    """
    reach = min(s_max, T) + min(t_max, T) - hyp
    lows = min(s_max, t_max)
    if reach > tol and lows > tol:
        return True
    if reach < -tol or lows < -tol:
        return False
    return None


def _build(n, m1, m2, r1, r2, alpha, beta, eps, T, boundary=False):
    s_lo, s_hi = _log_bounds(eps, r1)
    t_lo, t_hi = _log_bounds(eps, r2)
    h = _log(Fraction(n) / eps)
    s_mid = s_hi if math.isinf(s_hi) else (s_lo + s_hi) / 2
    t_mid = t_hi if math.isinf(t_hi) else (t_lo + t_hi) / 2
    width = max((s_hi - s_lo) if math.isfinite(s_hi) else 0.0,
                (t_hi - t_lo) if math.isfinite(t_hi) else 0.0)
    slack = width + GEOM_TOL * max(1.0, abs(h))
    meets = _meets_square(s_mid, t_mid, h, T, slack)
    if meets is False:
        return None
    return Excursion(n, m1, m2, r1, r2, eps, s_mid, t_mid, h, slack, boundary or meets is None)


def excursion_leg(n: int, alpha: RealSpec, beta: RealSpec, eps) -> tuple[float, float]:
    """Enclosure of ``log(eps^3 / (n <n alpha> <n beta>))`` for any ``eps > 0``.

    Negative exactly when the triangle for ``n`` is empty.
    """
    eps = Fraction(eps)
    if eps <= 0 or n < 1:
        raise InputError("need eps > 0 and n >= 1")
    v = littlewood_value(n, as_spec(alpha), as_spec(beta), 80)
    return _log_bounds(eps ** 3, v)


def excursion_for(n: int, alpha: RealSpec, beta: RealSpec, eps, T: float,
                  allow_rational: bool = False) -> Excursion | None:
    """The triangle ``d_{eps,n}``, if it is nonempty and meets ``[0, T]^2``.

    ``m1``, ``m2`` are minus the nearest integers to ``n alpha``, ``n beta``;
    no other companions can qualify (see :func:`uniqueness_check`).
    """
    if n < 1:
        raise InputError("n must be positive")
    if T <= 0:
        raise InputError("T must be positive")
    eps = _check_eps(eps)
    alpha, beta = as_spec(alpha), as_spec(beta)
    if not allow_rational:
        _require_irrational(alpha, beta)
    c = compare_littlewood(n, alpha, beta, eps ** 3)
    if c is not None and c > 0:
        return None
    k1, r1 = nearest_integer(alpha, n, 80)
    k2, r2 = nearest_integer(beta, n, 80)
    return _build(n, -k1, -k2, r1, r2, alpha, beta, eps, T, boundary=c is None)


def uniqueness_check(n: int, alpha: RealSpec, beta: RealSpec, eps, T: float) -> int:
    """Number of ``(m1, m2)`` whose triangle for ``n`` meets ``[0, T]^2``.

    Exhaustive over all companions with ``|n alpha + m1| <= eps`` and
    ``|n beta + m2| <= eps``; anything above 1 refutes uniqueness.
    """
    eps = _check_eps(eps)
    alpha, beta = as_spec(alpha), as_spec(beta)
    bits = 80 + n.bit_length()
    a_iv = eval_interval(alpha, bits) * n
    b_iv = eval_interval(beta, bits) * n

    def companions(iv: Interval):
        lo, hi = -iv.hi - eps, -iv.lo + eps
        out = []
        for m in range(math.floor(lo), math.ceil(hi) + 1):
            r = (iv + m).abs()
            if r.lo <= eps:
                out.append((m, r))
        return out

    count = 0
    for m1, r1 in companions(a_iv):
        for m2, r2 in companions(b_iv):
            if (r1.times(r2) * n).lo > eps ** 3:
                continue
            if _build(n, m1, m2, r1, r2, alpha, beta, eps, T) is not None:
                count += 1
    return count


def uniqueness_scan(alpha: RealSpec, beta: RealSpec, eps, T: float, n_max: int) -> tuple[int, list[int]]:
    """Largest companion multiplicity over ``1 <= n <= n_max``.

    Only the nearest and second-nearest integers can come within ``eps < 1/2``
    of ``n alpha``, so the four combinations per ``n`` are exhaustive.  They
    are screened in float64 with a generous margin; any ``n`` that might
    carry two triangles is decided by :func:`uniqueness_check`.  Returns the
    maximum multiplicity and the ``n`` attaining a multiplicity above one.
    """
    eps = _check_eps(eps)
    alpha, beta = as_spec(alpha), as_spec(beta)
    if n_max > MAX_N:
        raise InputError("n_max exceeds 2**40")
    ef, tol = float(eps), 1e-9
    best, bad = 0, []
    sa, sb = FracStream(alpha), FracStream(beta)
    start = 1
    while start <= n_max:
        length = min(1 << 20, n_max - start + 1)
        d1, _ = sa.block(length)
        d2, _ = sb.block(length)
        n = np.arange(start, start + length, dtype=np.float64)
        hyp = np.log(n / ef)
        maybe = np.zeros(length, dtype=np.int64)
        sure = np.zeros(length, dtype=np.int64)
        with np.errstate(divide="ignore"):
            for r1 in (d1, 1 - d1):
                for r2 in (d2, 1 - d2):
                    s = np.log(ef / r1)
                    t = np.log(ef / r2)
                    reach = np.minimum(s, T) + np.minimum(t, T) - hyp
                    low = np.minimum(s, t)
                    maybe += (reach >= -tol) & (low >= -tol)
                    sure += (reach > tol) & (low > tol)
        best = max(best, int(sure.max()))
        for i in np.flatnonzero(maybe > 1):
            m = int(start + i)
            k = uniqueness_check(m, alpha, beta, eps, T)
            best = max(best, k)
            if k > 1:
                bad.append(m)
        start += length
    return best, bad


def all_excursions(alpha: RealSpec, beta: RealSpec, eps, T: float, allow_rational: bool = False,
                   threads: int = 1) -> list[Excursion]:
    """Every triangle meeting ``[0, T]^2``, by ascending ``n``.

    Such a triangle needs ``log(n / eps) <= 2T``, so ``n <= eps e^{2T}``; the
    candidates are exactly the closed hits of the counter at ``eps^3``.
    """
    eps = _check_eps(eps)
    alpha, beta = as_spec(alpha), as_spec(beta)
    if not allow_rational:
        _require_irrational(alpha, beta)
    if T <= 0:
        raise InputError("T must be positive")
    with mpmath.workprec(256):
        top = int(mpmath.floor(mpmath.mpf(eps.numerator) / eps.denominator * mpmath.exp(2 * mpmath.mpf(T))))
    if top > MAX_N:
        raise InputError("eps e^{2T} exceeds 2**40")
    if top < 1:
        return []
    rep = count_below(alpha, beta, eps ** 3, top, "closed", threads, max_hits=MAX_N)
    if rep.hits_truncated:
        raise InputError("too many candidate n")
    cands = sorted({m for m, _, _ in rep.hits} | set(rep.boundary_cases))
    out = []
    for n in cands:
        e = excursion_for(n, alpha, beta, eps, T, allow_rational=True)
        if e is not None:
            out.append(e)
    return out


# -- projection ---------------------------------------------------------------

def clipped_polygon(e: Excursion, T: float) -> list[tuple[float, float]]:
    """Vertices of ``d_{eps,n} ∩ [0, T]^2`` (Sutherland-Hodgman clipping)."""
    big = 4 * T + abs(e.hyp) + 1
    sm, tm = min(e.s_max, big), min(e.t_max, big)
    poly = [(sm, tm), (e.hyp - tm, tm), (sm, e.hyp - sm)]
    # half-planes a*s + b*t <= c
    for a, b, c in ((-1, 0, 0), (0, -1, 0), (1, 0, T), (0, 1, T)):
        out = []
        for i, p in enumerate(poly):
            q = poly[(i + 1) % len(poly)]
            fp, fq = a * p[0] + b * p[1] - c, a * q[0] + b * q[1] - c
            if fp <= 0:
                out.append(p)
            if fp * fq < 0:
                w = fp / (fp - fq)
                out.append((p[0] + w * (q[0] - p[0]), p[1] + w * (q[1] - p[1])))
        poly = out
        if not poly:
            break
    return poly


def project(e: Excursion, T: float) -> tuple[float, float]:
    """``pi(d_{eps,n} ∩ [0, T]^2)`` as ``(log(n/eps), max s+t)``."""
    if _meets_square(e.s_max, e.t_max, e.hyp, T, 0.0) is False:
        raise InputError(f"triangle for n={e.n} misses [0, T]^2")
    top = min(e.s_max, T) + min(e.t_max, T)
    return e.hyp, max(top, e.hyp)


def project_by_vertices(e: Excursion, T: float) -> tuple[float, float]:
    poly = clipped_polygon(e, T)
    if not poly:
        raise InputError(f"triangle for n={e.n} misses [0, T]^2")
    sums = [s + t for s, t in poly]
    return min(sums), max(sums)


def maximal_intervals(intervals) -> tuple[list, IntervalSet, list]:
    """Keep the positive-length intervals not contained in another one.

    ``intervals`` holds ``(key, lo, hi)`` triples.  Returns the kept keys (in
    order of left endpoint), the union of the kept intervals, and the keys
    dropped as exact duplicates of a kept interval (the smaller key is kept).
    The union over kept intervals equals the union over all of them; this is
    asserted.

    >>> keys, union, dup = maximal_intervals([(1, 0, 2), (2, 0.5, 1.5), (3, 1, 3)])
    >>> keys, union.length
    ([1, 3], 3)
    """
    items = sorted((lo, -hi, key) for key, lo, hi in intervals if hi > lo)
    kept, dups = [], []
    reach, last = -math.inf, None
    for lo, neg_hi, key in items:
        hi = -neg_hi
        if hi > reach:
            kept.append((key, lo, hi))
            reach = hi
        elif last is not None and (lo, hi) == last[1:]:
            dups.append(key)
        if kept and kept[-1][0] == key:
            last = (key, lo, hi)
    union = IntervalSet((lo, hi) for _, lo, hi in kept)
    full = IntervalSet((lo, hi) for _, lo, hi in intervals if hi > lo)
    assert abs(union.length - full.length) <= 1e-10 * max(1.0, full.length), "union not preserved"
    return [k for k, _, _ in kept], union, dups


def _lambda_top(lam: float) -> int:
    # largest p with p log 2 <= lam / 3, rounding down at float ties
    p = math.floor(lam / (3 * LOG2))
    while p > 0 and p * LOG2 > lam / 3:
        p -= 1
    return max(p, 0)


def lambda_set(n: int, lam: float) -> list[int]:
    """``{2^p n : p >= 0, p log 2 <= lam / 3}``.

    >>> lambda_set(7, 6.3)
    [7, 14, 28, 56]
    """
    if lam <= 0:
        raise InputError("lambda must be positive")
    return [n << p for p in range(_lambda_top(lam) + 1)]


@dataclass
class ExcursionClass:
    members: list[int]
    base: int
    exponents: list[int]
    lambda_union: list[int]
    proj_length: float
    interval_length: float
    violations: list[str] = field(default_factory=list)


class _DisjointSet:
    def __init__(self, keys):
        self.parent = {k: k for k in keys}

    def find(self, k):
        while self.parent[k] != k:
            self.parent[k] = self.parent[self.parent[k]]
            k = self.parent[k]
        return k

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _odd_part(n: int) -> tuple[int, int]:
    a = (n & -n).bit_length() - 1
    return n >> a, a


def equivalence_classes(xi: dict[int, tuple[float, float]], eps) -> list[ExcursionClass]:
    """Partition ``Xi`` by chains of intersecting doubling sets.

    ``xi`` maps each kept ``n`` to its projection ``(lo, hi)``.  Within a class
    the members differ by powers of two and their doubling sets interleave;
    any breach is recorded in :attr:`ExcursionClass.violations`.
    """
    eps = Fraction(eps)
    lam = {n: hi - lo for n, (lo, hi) in xi.items()}
    lams = {n: set(lambda_set(n, lam[n])) for n in xi}
    ds = _DisjointSet(sorted(xi))
    by_odd: dict[int, list[int]] = {}
    for n in sorted(xi):
        by_odd.setdefault(_odd_part(n)[0], []).append(n)
    for group in by_odd.values():
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                if lams[a] & lams[b]:
                    ds.union(a, b)
    classes: dict[int, list[int]] = {}
    for n in sorted(xi):
        classes.setdefault(ds.find(n), []).append(n)
    out = []
    for members in classes.values():
        n1 = members[0]
        bad = []
        exps = []
        for n in members:
            q, r = divmod(n, n1)
            if r or q & (q - 1):
                bad.append(f"n={n} is not a power of two times {n1}")
                exps.append(-1)
            else:
                exps.append(q.bit_length() - 1)
        tops = [max(lams[n]) for n in members]
        for i in range(len(members) - 1):
            if not (members[i + 1] <= tops[i] <= tops[i + 1]):
                bad.append(f"interleaving fails between n={members[i]} and n={members[i + 1]}")
        merged = sorted(set().union(*(lams[n] for n in members)))
        nk = members[-1]
        length_i = math.log(nk / n1) + lam[nk] / 3
        expected = [n1 << p for p in range(_lambda_top(3 * length_i) + 1)]
        if merged != expected:
            bad.append(f"merged doubling set of class {n1} differs from the interval form")
        proj = IntervalSet(xi[n] for n in members).length
        out.append(ExcursionClass(members, n1, exps, merged, proj, length_i, bad))
    return out


# -- end-to-end verification ----------------------------------------------------

@dataclass
class CheckRecord:
    name: str
    status: str  # pass | fail | inconclusive | skipped
    detail: dict = field(default_factory=dict)


@dataclass
class CuspReport:
    config: dict
    status: str
    checks: list[CheckRecord]
    escape: tuple[float, float]
    count: int
    N: int
    excursions: list[Excursion]
    xi: list[int]
    classes: list[ExcursionClass]
    union_all: float
    union_xi: float

    def summary(self) -> dict:
        return {c.name: c.status for c in self.checks}


@lru_cache(maxsize=64)
def _cusp_chain(alpha: RealSpec, beta: RealSpec, eps: Fraction, T: float, depth: int, threads: int):
    """The gamma-independent part of :func:`verify_cusp_proposition`."""
    from .empirical import union_area_bound

    exc = all_excursions(alpha, beta, eps, T, threads=threads)
    bound = union_area_bound(exc, T, depth)
    N = count_limit(T)
    if N > MAX_N:
        raise InputError("e^{2T} exceeds 2**40")
    rep = count_below(alpha, beta, eps ** 3, N, "closed", threads, max_hits=MAX_N)
    count = rep.count_closed
    hitset = {m for m, _, _ in rep.hits} if rep.hits is not None else set()
    checks: list[CheckRecord] = []

    multi = [e.n for e in exc if uniqueness_check(e.n, alpha, beta, eps, T) > 1]
    checks.append(CheckRecord("uniqueness", "fail" if multi else "pass",
                              {"scanned": len(exc), "witnesses": multi[:10]}))

    proj = {e.n: project(e, T) for e in exc}
    mismatch = [n for n, e in zip(proj, exc)
                if max(abs(a - b) for a, b in zip(proj[n], project_by_vertices(e, T))) > 1e-9]
    checks.append(CheckRecord("projection_closed_form", "fail" if mismatch else "pass",
                              {"witnesses": mismatch[:10]}))

    keys, union, dups = maximal_intervals([(n, lo, hi) for n, (lo, hi) in proj.items()])
    union_all = IntervalSet(v for v in proj.values() if v[1] > v[0]).length
    union_xi = union.length
    checks.append(CheckRecord("xi_union_equality",
                              "pass" if abs(union_all - union_xi) <= 1e-10 else "fail",
                              {"union_all": union_all, "union_xi": union_xi, "duplicates": dups}))

    xi = {n: proj[n] for n in keys}
    classes = equivalence_classes(xi, eps)
    broken = [c.base for c in classes if c.violations]
    checks.append(CheckRecord("class_structure", "fail" if broken else "pass",
                              {"witnesses": broken[:10]}))
    short = []
    for c in classes:
        rhs = c.proj_length / (3 * LOG2)
        if len(c.lambda_union) < rhs * (1 + 1e-12) + 1e-12:
            short.append({"class": c.base, "size": len(c.lambda_union), "bound": rhs})
    checks.append(CheckRecord("class_doubling_bound", "fail" if short else "pass",
                              {"classes": len(classes), "witnesses": short[:10]}))

    lam_union = sorted(set().union(*(set(c.lambda_union) for c in classes))) if classes else []
    stray = [m for m in lam_union if m > N or (
        m not in hitset and compare_littlewood(m, alpha, beta, eps ** 3) not in (-1, 0))]
    checks.append(CheckRecord("doubling_transport", "fail" if stray else "pass",
                              {"size": len(lam_union), "witnesses": stray[:10]}))
    chain_ok = count >= len(lam_union) >= union_xi / (3 * LOG2) - 1e-9
    checks.append(CheckRecord("counting_chain", "pass" if chain_ok else "fail",
                              {"count": count, "lambda_union": len(lam_union),
                               "union_bound": union_xi / (3 * LOG2)}))

    return exc, bound, N, count, checks, keys, classes, union_all, union_xi


def verify_cusp_proposition(alpha: RealSpec, beta: RealSpec, eps, T: float, gamma: float,
                            depth: int = 12, threads: int = 1) -> CuspReport:
    """Check, at finite ``T``, the chain from cusp time to near-solutions.

    If the certified fraction of ``[0, T]^2`` spent in ``X_eps`` is at least
    ``gamma``, then ``|{n < e^{2T} : n<n alpha><n beta> <= eps^3}|`` must be at
    least ``gamma T / (3 log 2)``.  The intermediate steps (uniqueness of
    companions, the maximal projections, the per-class doubling bound, the
    transport of doubling sets into the hit set) are checked unconditionally.
    """
    if not 0 < gamma < 1:
        raise InputError("gamma must lie in (0, 1)")
    eps = _check_eps(eps)
    alpha, beta = as_spec(alpha), as_spec(beta)
    _require_irrational(alpha, beta)
    exc, bound, N, count, chain, keys, classes, union_all, union_xi = _cusp_chain(
        alpha, beta, eps, float(T), depth, threads)
    checks = list(chain)
    lo, hi = bound.lower, bound.upper
    target = gamma * T / (3 * LOG2)
    if lo >= gamma:
        hyp = "met"
        ok = count >= target and union_all >= gamma * T - 1e-9
        checks.append(CheckRecord("implication", "pass" if ok else "fail",
                                  {"count": count, "target": target, "escape_lower": lo,
                                   "union_all": union_all}))
    elif hi < gamma:
        hyp = "not met"
        checks.append(CheckRecord("implication", "skipped", {"escape_upper": hi}))
    else:
        hyp = "inconclusive"
        checks.append(CheckRecord("implication", "inconclusive", {"escape": [lo, hi]}))

    if any(c.status == "fail" for c in checks):
        status = "fail"
    elif hyp == "inconclusive":
        status = "inconclusive"
    elif hyp == "not met":
        status = "hypothesis not met"
    else:
        status = "pass"
    config = {"alpha": str(alpha), "beta": str(beta), "eps": str(eps), "T": T,
              "gamma": gamma, "depth": depth}
    return CuspReport(config, status, checks, (lo, hi), count, N, exc, keys, classes,
                      union_all, union_xi)


@dataclass
class CoverReport:
    samples: int
    compared: int
    excluded: int
    boundary: int
    agree: int
    disagreements: list[tuple[float, float]]

    @property
    def status(self) -> str:
        return "pass" if not self.disagreements else "fail"


def verify_cover_identity(alpha: RealSpec, beta: RealSpec, eps, T: float, samples: int = 10_000,
                          seed: int = 0, margin: float = 1e-9) -> CoverReport:
    """Compare triangle membership with shortest-vector membership in ``X_eps``.

    Points come from a scrambled Halton sequence over ``[0, T]^2``; points
    within ``margin`` of any triangle edge are excluded.
    """
    from scipy.stats import qmc

    eps = _check_eps(eps)
    alpha, beta = as_spec(alpha), as_spec(beta)
    exc = all_excursions(alpha, beta, eps, T)
    pts = qmc.Halton(d=2, scramble=True, seed=seed).random(samples) * T
    base = tau_lattice(alpha, beta)
    smax = np.array([e.s_max for e in exc])
    tmax = np.array([e.t_max for e in exc])
    hyp = np.array([e.hyp for e in exc])
    slack = np.array([e.slack for e in exc])
    excluded = boundary = agree = compared = 0
    bad = []
    for s, t in pts:
        s, t = float(s), float(t)
        if len(exc):
            dist = np.minimum(np.minimum(np.abs(s - smax), np.abs(t - tmax)),
                              np.abs(s + t - hyp) / math.sqrt(2))
            near = dist <= margin + slack
            # only edges of triangles that could contain the point matter
            relevant = (s <= smax + margin + slack) & (t <= tmax + margin + slack) & \
                       (s + t >= hyp - margin - slack)
            if np.any(near & relevant):
                excluded += 1
                continue
            tri = bool(np.any((s <= smax) & (t <= tmax) & (s + t >= hyp)))
        else:
            tri = False
        mem = in_X_eps(apply_flow(base, (s, t)), eps)
        if mem.boundary:
            boundary += 1
            continue
        compared += 1
        if mem.inside == tri:
            agree += 1
        else:
            bad.append((s, t))
    return CoverReport(samples, compared, excluded, boundary, agree, bad)
