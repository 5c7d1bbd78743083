"""Slow, independent reference computations used to cross-check the library.

Everything here is written directly against mpmath, exact fractions or
scipy, without going through the fast paths being tested.
"""
from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import linprog


def hp(x, dps: int = 60):
    """High-precision value of a small set of test inputs."""
    with mpmath.workdps(dps):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        if isinstance(x, str) and x.startswith("sqrt"):
            return mpmath.sqrt(int(x[4:]))
        return mpmath.mpf(x)


def dist(x):
    return abs(x - mpmath.nint(x))


def littlewood(n: int, a, b):
    with mpmath.workdps(60):
        return n * dist(n * a) * dist(n * b)


def count_exact_rational(a: Fraction, b: Fraction, eps: Fraction, N: int, closed=False) -> list[int]:
    out = []
    for n in range(1, N + 1):
        da = abs(n * a - round(n * a))
        db = abs(n * b - round(n * b))
        v = n * da * db
        if v < eps or (closed and v == eps):
            out.append(n)
    return out


def count_mp(a, b, eps, N: int) -> list[int]:
    """Strict hits by straight mpmath evaluation (60 digits)."""
    e = hp(Fraction(eps))
    with mpmath.workdps(60):
        return [n for n in range(1, N + 1) if littlewood(n, a, b) < e]


def systole_flowed_tau(a, b, s: float, t: float):
    """Sup-norm systole of ``a_{s,t} tau_{a,b} Z^3`` from excursion candidates.

    A short vector has ``|n| e^{-s-t} <= 1`` and, for ``s, t >= 1``, only the
    nearest or second-nearest companions can keep the other coordinates
    below 1.
    """
    with mpmath.workdps(60):
        es, et = mpmath.exp(s), mpmath.exp(t)
        best = min(es, et)
        for n in range(1, int(mpmath.floor(mpmath.exp(s + t))) + 1):
            x0 = n / (es * et)
            for m1 in (mpmath.floor(n * a), mpmath.ceil(n * a)):
                for m2 in (mpmath.floor(n * b), mpmath.ceil(n * b)):
                    v = max(x0, es * abs(n * a - m1), et * abs(n * b - m2))
                    best = min(best, v)
        return best


def systole_box(basis: np.ndarray) -> float:
    """Brute-force sup-norm minimum over the full coefficient box.

    Any vector of sup-norm at most 1 (Minkowski) has coefficients bounded by
    the row sums of ``|B^{-1}|``; every such coefficient vector is tried.
    """
    bound = np.floor(np.abs(np.linalg.inv(basis)).sum(axis=1) + 1e-9).astype(int)
    ranges = [np.arange(-k, k + 1) for k in bound]
    c = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, 3)
    c = c[np.any(c != 0, axis=1)]
    return float(np.min(np.max(np.abs(c @ basis.T), axis=1)))


def clipped_max_sum(s_max: float, t_max: float, hyp: float, T: float) -> float:
    """``max s + t`` over the triangle intersected with ``[0, T]^2`` (LP)."""
    res = linprog(c=[-1, -1], A_ub=[[1, 0], [0, 1], [-1, -1]], b_ub=[s_max, t_max, -hyp],
                  bounds=[(0, T), (0, T)], method="highs")
    assert res.status == 0
    return -res.fun


def union_length(intervals) -> float:
    """Sweep over sorted endpoints with an open-interval counter."""
    ev = sorted([(a, 0) for a, b in intervals] + [(b, 1) for a, b in intervals])
    depth, start, total = 0, None, 0.0
    for x, kind in ev:
        if kind == 0:
            if depth == 0:
                start = x
            depth += 1
        else:
            depth -= 1
            if depth == 0:
                total += x - start
    return total
