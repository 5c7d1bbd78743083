"""Exact counting of near-solutions ``n <n alpha> <n beta> < eps``.

The fast path tracks ``frac(n alpha)`` and ``frac(n beta)`` with 96-bit fixed
point streams, a block of 2**20 indices at a time, and classifies every ``n``
in float64 together with a rigorous error bound.  Any ``n`` whose value lies
within the error bound (or within 2**-40) of the threshold is re-decided with
exact arithmetic, so the counts are exact.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from ._parallel import pmap
from .realnum import FracStream, InputError, Interval, RealSpec, compare_littlewood, littlewood_value

__all__ = [
    "MAX_N",
    "CountReport",
    "NormalizedCount",
    "count_below",
    "count_limit",
    "normalized_count",
    "running_min_trace",
]

MAX_N = 1 << 40
MARGIN = 2.0 ** -40
BLOCK = 1 << 20
MAX_HITS = 10 ** 6


@dataclass
class CountReport:
    alpha: RealSpec
    beta: RealSpec
    eps: Fraction
    N: int
    mode: str
    count_strict: int
    count_closed: int
    boundary_cases: list[int] = field(default_factory=list)
    hits: list[tuple[int, float, float]] | None = None
    hits_truncated: bool = False
    running_min: tuple[int, Interval] | None = None
    rechecked: int = 0
    elapsed: float = 0.0

    @property
    def count(self) -> int:
        return self.count_strict if self.mode == "strict" else self.count_closed

    @property
    def throughput(self) -> float:
        return self.N / self.elapsed if self.elapsed > 0 else float("inf")


def _block_values(alpha, beta, start: int, length: int):
    """Values and error bounds for n = start .. start+length-1."""
    d1, e1 = FracStream(alpha, start=start - 1).block(length)
    d2, e2 = FracStream(beta, start=start - 1).block(length)
    n = np.arange(start, start + length, dtype=np.float64)
    v = n * d1 * d2
    err = n * (e1 * (d2 + e2) + e2 * d1) + v * 2.0 ** -50
    return n, v, err


def _count_range(args):
    alpha, beta, eps, lo, hi, keep_hits = args
    eps_f = float(eps)
    strict = closed = rechecked = 0
    boundary: list[int] = []
    hits: list[tuple[int, float, float, bool]] = []
    best: tuple[int, Interval] | None = None
    start = lo
    while start <= hi:
        length = min(BLOCK, hi - start + 1)
        n, v, err = _block_values(alpha, beta, start, length)
        margin = err + MARGIN
        below = v < eps_f - margin
        near = ~below & (v <= eps_f + margin)
        k = int(np.count_nonzero(below))
        strict += k
        closed += k
        if keep_hits and k:
            idx = np.flatnonzero(below)
            lo_v = np.maximum(v[idx] - err[idx], 0.0)
            hi_v = v[idx] + err[idx]
            hits.extend((int(start + i), float(a), float(b), False)
                        for i, a, b in zip(idx, np.nextafter(lo_v, -1), np.nextafter(hi_v, 2)))
        for i in np.flatnonzero(near):
            m = int(start + i)
            rechecked += 1
            c = compare_littlewood(m, alpha, beta, eps)
            if c is None:
                boundary.append(m)
                continue
            if c < 0:
                strict += 1
            if c <= 0:
                closed += 1
                if keep_hits:
                    a, b = littlewood_value(m, alpha, beta, 64).floats()
                    hits.append((m, a, b, c == 0))
        # running minimum: every index whose value may be the block minimum
        j = int(np.argmin(v))
        cand = np.flatnonzero(v - err <= v[j] + err[j])
        for i in cand[np.argsort(v[cand], kind="stable")]:
            if best is not None and best[1].hi == 0:
                break
            if best is not None and best[1].hi < v[i] - err[i]:
                continue
            m = int(start + i)
            iv = littlewood_value(m, alpha, beta, 64)
            if best is None or iv.hi < best[1].hi:
                best = (m, iv)
        start += length
    hits.sort()
    return strict, closed, boundary, hits, best, rechecked


def _check(eps, N):
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise InputError("eps must lie in (0, 1/2)")
    if N < 1:
        raise InputError("N must be >= 1")
    if N > MAX_N:
        raise InputError("N exceeds 2**40 (fixed-point error budget)")
    return eps


def _ranges(N: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, N))
    step = -(-N // parts)
    return [(a, min(a + step - 1, N)) for a in range(1, N + 1, step)]


def count_below(alpha: RealSpec, beta: RealSpec, eps, N: int, mode: str = "strict",
                threads: int = 1, store_hits: bool = True,
                max_hits: int = MAX_HITS) -> CountReport:
    """Count ``1 <= n <= N`` with ``n<n alpha><n beta>`` below ``eps``.

    ``mode`` is ``"strict"`` (``< eps``) or ``"closed"`` (``<= eps``); both
    counts are always computed.  Work is split into ``threads`` contiguous
    ranges handled by separate processes; the result does not depend on it.
    """
    if mode not in ("strict", "closed"):
        raise InputError("mode must be 'strict' or 'closed'")
    eps = _check(eps, N)
    t0 = time.perf_counter()
    parts = pmap(_count_range, [(alpha, beta, eps, a, b, store_hits)
                                for a, b in _ranges(N, threads)], threads)
    strict = sum(p[0] for p in parts)
    closed = sum(p[1] for p in parts)
    boundary = sorted(m for p in parts for m in p[2])
    best = None
    for p in parts:
        if p[4] is not None and (best is None or p[4][1].hi < best[1].hi):
            best = p[4]
    hits, truncated = None, False
    if store_hits:
        hits = [(m, a, b) for p in parts for m, a, b, eq in p[3] if mode == "closed" or not eq]
        if len(hits) > max_hits:
            hits, truncated = hits[:max_hits], True
    return CountReport(alpha, beta, eps, N, mode, strict, closed, boundary, hits, truncated,
                       best, sum(p[5] for p in parts), time.perf_counter() - t0)


def count_limit(T: float) -> int:
    """Number of positive integers ``n < e^{2T}``."""
    if T <= 0:
        return 0
    with mpmath.workprec(256):
        e = mpmath.exp(2 * mpmath.mpf(T))
        return int(mpmath.ceil(e)) - 1


@dataclass
class NormalizedCount:
    T: float
    N: int
    count: int
    value: float
    target: float | None = None
    report: CountReport | None = None


def normalized_count(alpha: RealSpec, beta: RealSpec, eps, T: float, gamma: float | None = None,
                     mode: str = "strict", threads: int = 1) -> NormalizedCount:
    """``|{n < e^{2T} : n<n alpha><n beta> < eps}| / T``.

    With ``gamma`` the comparison value ``gamma / (3 log 2)`` is attached.
    """
    N = count_limit(T)
    if N > MAX_N:
        raise InputError("e^{2T} exceeds 2**40")
    target = gamma / (3 * math.log(2)) if gamma is not None else None
    if N == 0:
        return NormalizedCount(T, 0, 0, 0.0, target)
    rep = count_below(alpha, beta, eps, N, mode, threads, store_hits=False)
    return NormalizedCount(T, N, rep.count, rep.count / T, target, rep)


def running_min_trace(alpha: RealSpec, beta: RealSpec, N: int,
                      checkpoints) -> list[tuple[int, int, Interval]]:
    """Certified running minimum of the Littlewood product at each checkpoint.

    Returns ``(checkpoint, argmin n, enclosure)``; the upper endpoints are
    non-increasing.
    """
    if N > MAX_N:
        raise InputError("N exceeds 2**40")
    cps = sorted({int(c) for c in checkpoints if 1 <= c <= N} | {N})
    out = []
    best = None
    lo = 1
    # eps only steers the count; any admissible value works here
    for cp in cps:
        if cp >= lo:
            part = _count_range((alpha, beta, Fraction(1, 4), lo, cp, False))[4]
            if part is not None and (best is None or part[1].hi < best[1].hi):
                best = part
            lo = cp + 1
        out.append((cp, best[0], best[1]))
    return out
