"""Symbol sequences, their empirical distributions and entropy.

Includes an exact count of the sequences in ``{1..k}^N`` whose empirical
distribution has entropy at most ``t`` (the Bowen set ``R(k, N, t)``), and a
coding of diagonal orbits by systole shells.

The shells are a computable stand-in for a partition adapted to a compact
set: bins ``1 .. k-1`` are systole shells above the smallest threshold and
bin ``k`` (the cusp bin) holds lattices with systole at most that threshold.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._parallel import pmap
from .empirical import SystoleBins
from .lattice import apply_flow, as_spec, tau_lattice
from .realnum import InputError

__all__ = [
    "Distribution",
    "dist",
    "entropy",
    "bowen_count",
    "BowenRow",
    "bowen_bound_check",
    "RowCoding",
    "OrbitCoding",
    "orbit_coding",
    "growth_constant",
]

EXHAUSTIVE_LIMIT = 10 ** 8
# entropies within this of t count as <= t
H_TOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    q: tuple

    def __post_init__(self):
        if not self.q:
            raise InputError("empty distribution")
        if any(x < 0 for x in self.q):
            raise InputError("negative mass")
        if abs(sum(self.q) - 1) > 1e-12:
            raise InputError("masses must sum to 1")

    @property
    def k(self) -> int:
        return len(self.q)

    def mix(self, other: "Distribution", lam) -> "Distribution":
        return Distribution(tuple(lam * a + (1 - lam) * b for a, b in zip(self.q, other.q)))


def dist(c: Sequence[int], k: int) -> Distribution:
    """Symbol frequencies of ``c`` over ``{1, ..., k}``, as exact fractions.

    >>> dist((1, 2, 1, 1), 2).q
    (Fraction(3, 4), Fraction(1, 4))
    """
    if not len(c):
        raise InputError("empty sequence")
    counts = Counter(c)
    if any(not (isinstance(s, (int, np.integer)) and 1 <= s <= k) for s in counts):
        raise InputError(f"symbols must lie in 1..{k}")
    return Distribution(tuple(Fraction(counts.get(i, 0), len(c)) for i in range(1, k + 1)))


def entropy(q) -> float:
    """``-sum q_i log q_i`` (natural log, ``0 log 0 = 0``)."""
    if isinstance(q, Distribution):
        q = q.q
    return math.fsum(-float(x) * math.log(x) for x in q if x > 0)


def _count_entropy(counts: np.ndarray, N: int) -> np.ndarray:
    p = counts / N
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log(p), 0.0)
    return terms.sum(axis=-1)


def _exhaustive_chunk(args):
    k, N, t, lo, hi = args
    idx = np.arange(lo, hi, dtype=np.int64)
    counts = np.zeros((hi - lo, k), dtype=np.int64)
    for _ in range(N):
        idx, d = np.divmod(idx, k)
        counts[np.arange(hi - lo), d] += 1
    return int(np.count_nonzero(_count_entropy(counts, N) <= t + H_TOL))


def _compositions(N: int, k: int):
    if k == 1:
        yield (N,)
        return
    for first in range(N + 1):
        for rest in _compositions(N - first, k - 1):
            yield (first,) + rest


def _types_count(k: int, N: int, t: float) -> int:
    total = 0
    for comp in _compositions(N, k):
        h = _count_entropy(np.array(comp, dtype=np.float64), N)
        if h <= t + H_TOL:
            m, left = 1, N
            for c in comp:
                m *= math.comb(left, c)
                left -= c
            total += m
    return total


def bowen_count(k: int, N: int, t: float, mode: str = "auto", workers: int = 1) -> int:
    """``|R(k, N, t)|``: sequences in ``{1..k}^N`` with ``H(dist(c)) <= t``.

    ``mode`` is ``"exhaustive"`` (enumerate all ``k^N`` sequences, allowed up
    to ``10^8`` of them), ``"types"`` (sum multinomial coefficients over
    frequency vectors) or ``"auto"``.

    >>> bowen_count(2, 3, 0)
    2
    """
    if k < 1 or N < 1:
        raise InputError("k and N must be positive")
    if mode == "auto":
        mode = "exhaustive" if k ** N <= 10 ** 6 else "types"
    if mode == "exhaustive":
        total = k ** N
        if total > EXHAUSTIVE_LIMIT:
            raise InputError("k^N exceeds 10^8")
        step = 1 << 20
        chunks = [(k, N, t, a, min(a + step, total)) for a in range(0, total, step)]
        return sum(pmap(_exhaustive_chunk, chunks, workers))
    if mode == "types":
        if math.comb(N + k - 1, k - 1) > EXHAUSTIVE_LIMIT:
            raise InputError("too many frequency vectors")
        return _types_count(k, N, t)
    raise InputError("mode must be 'auto', 'exhaustive' or 'types'")


@dataclass(frozen=True)
class BowenRow:
    N: int
    count: int
    rate: float
    envelope: float

    @property
    def ok(self) -> bool:
        return self.rate <= self.envelope


def bowen_bound_check(k: int, n_max: int, t: float, mode: str = "auto") -> list[BowenRow]:
    """Rows ``(N, |R|, log|R| / N, t + k log(N+1) / N)`` for ``N = 1 .. n_max``.

    The envelope comes from counting type classes: at most ``(N+1)^k`` of
    them, each holding at most ``e^{N H}`` sequences.
    """
    rows = []
    for N in range(1, n_max + 1):
        c = bowen_count(k, N, t, mode)
        rate = math.log(c) / N if c else -math.inf
        rows.append(BowenRow(N, c, rate, t + k * math.log(N + 1) / N))
    return rows


# -- orbit coding ---------------------------------------------------------------

@dataclass(frozen=True)
class RowCoding:
    n: int
    symbols: tuple
    rate: float
    flagged: bool


@dataclass(frozen=True)
class OrbitCoding:
    N: int
    M: int
    k: int
    rows: tuple
    cusp_fraction: Fraction
    threshold: float | None

    @property
    def rates(self) -> list[float]:
        return [r.rate for r in self.rows]


def _code_row(args):
    alpha, beta, thresholds, n, length = args
    bins = SystoleBins(thresholds)
    base = apply_flow(tau_lattice(alpha, beta), (0, n))
    k = len(thresholds) + 1
    # bin 0 of SystoleBins is the cusp; it becomes symbol k
    return tuple(k - bins(apply_flow(base, (m, 0))) for m in range(length))


def orbit_coding(alpha, beta, N: int, M: int, thresholds: Sequence, threshold: float | None = None,
                 workers: int = 1) -> OrbitCoding:
    """Code ``a_1^m a_2^n tau Z^3`` (``0 <= m, n < N``) by systole shells.

    For each row ``n`` the ``M``-blocks starting at ``m = 0 .. N-1`` are
    tallied and ``H(blocks) / M`` is reported; rows whose rate is below
    ``threshold`` are flagged.  ``cusp_fraction`` is the share of grid
    points in the cusp bin.
    """
    if N < 1 or M < 1:
        raise InputError("N and M must be positive")
    alpha, beta = as_spec(alpha), as_spec(beta)
    k = len(thresholds) + 1
    SystoleBins(thresholds)  # validates
    length = N + M - 1
    apply_flow(tau_lattice(alpha, beta), (length - 1, N - 1))
    codes = pmap(_code_row, [(alpha, beta, tuple(thresholds), n, length) for n in range(N)], workers)
    rows = []
    cusp = 0
    for n, sym in enumerate(codes):
        blocks = Counter(sym[m:m + M] for m in range(N))
        rate = entropy([Fraction(c, N) for c in blocks.values()]) / M
        rows.append(RowCoding(n, sym, rate, threshold is not None and rate < threshold))
        cusp += sum(1 for s in sym[:N] if s == k)
    return OrbitCoding(N, M, k, tuple(rows), Fraction(cusp, N * N), threshold)


def growth_constant(bits: int = 128):
    """``3 + 2 (4 + log 4)``, the coefficient of ``gamma`` in the bound on
    ``lambda_eps``; it must stay below 15."""
    import mpmath

    with mpmath.workprec(bits):
        return +(3 + 2 * (4 + mpmath.log(4)))
