"""Unimodular lattices in R^3 under the diagonal flow.

A lattice is stored by a 3x3 basis whose columns generate it.  Lattices of
the form ``a_{s,t} tau_{alpha,beta} Z^3`` additionally remember
``(alpha, beta, s, t)``; their short vectors are then certified from exact
integer coordinates ``(n, m1, m2)``, whose image is

    (e^{-s-t} n,  e^s (n alpha + m1),  e^t (n beta + m2)).

All norms are sup-norms.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numpy as np

from .realnum import MAX_BITS, Decimal, InputError, Interval, Rational, RealSpec, scaled_floor

__all__ = [
    "FlowParams",
    "Provenance",
    "LatticeState",
    "Systole",
    "Membership",
    "TracePoint",
    "working_precision",
    "flow_budget",
    "flow_matrix",
    "tau_matrix",
    "conjugate",
    "conjugation_rates",
    "as_spec",
    "tau_lattice",
    "apply_flow",
    "systole",
    "in_X_eps",
    "orbit_trace",
    "random_unimodular",
    "lll_reduce",
]


def working_precision() -> int:
    """Bits used for certified evaluation (``LLAB_PRECISION_BITS``, default 128)."""
    return int(os.environ.get("LLAB_PRECISION_BITS", "128"))


def flow_budget(bits: int | None = None) -> float:
    """Largest allowed ``|s| + |t|`` at the given working precision."""
    bits = bits or working_precision()
    return 0.6 * bits * math.log(2)


@dataclass(frozen=True)
class FlowParams:
    s: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        s, t = float(self.s), float(self.t)
        if not (math.isfinite(s) and math.isfinite(t)):
            raise InputError("flow parameters must be finite")
        if s < 0 or t < 0:
            raise InputError("flow parameters must be >= 0 (the semigroup A+)")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "t", t)

    def __add__(self, other: "FlowParams") -> "FlowParams":
        return FlowParams(self.s + other.s, self.t + other.t)

    def matrix(self) -> np.ndarray:
        return flow_matrix(self.s, self.t)


def flow_matrix(s: float, t: float) -> np.ndarray:
    return np.diag([math.exp(-s - t), math.exp(s), math.exp(t)])


def tau_matrix(u1: float, u2: float) -> np.ndarray:
    return np.array([[1.0, 0.0, 0.0], [u1, 1.0, 0.0], [u2, 0.0, 1.0]])


def conjugate(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``a g a^{-1}`` for a diagonal ``a``."""
    d = np.diag(a)
    return g * d[:, None] / d[None, :]


def conjugation_rates(s: float, t: float) -> tuple[float, float]:
    """Factors by which ``a_{s,t}`` conjugation stretches ``(u1, u2)``.

    ``a_{s,t} tau_{u1,u2} a_{s,t}^{-1} = tau_{e^{2s+t} u1, e^{s+2t} u2}``.
    """
    return math.exp(2 * s + t), math.exp(s + 2 * t)


def as_spec(x) -> RealSpec:
    if isinstance(x, RealSpec):
        return x
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return Rational(x.numerator, x.denominator)
    if isinstance(x, float):
        return Decimal(repr(x))
    raise InputError(f"cannot interpret {x!r} as a real number spec")


@dataclass(frozen=True)
class Provenance:
    alpha: RealSpec
    beta: RealSpec
    s: float = 0.0
    t: float = 0.0


class Systole(NamedTuple):
    """Shortest vector: integer coordinates, certified sup-norm, and ties."""

    coeffs: tuple[int, int, int]
    norm: Interval
    ties: tuple = ()

    @property
    def value(self) -> float:
        return self.norm.mid


class Membership(NamedTuple):
    inside: bool
    boundary: bool = False


@dataclass(frozen=True, eq=False)
class LatticeState:
    """A unimodular lattice; see :func:`tau_lattice` and :meth:`from_basis`."""

    basis: np.ndarray
    provenance: Provenance | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_basis(cls, basis, tol: float = 1e-12) -> "LatticeState":
        b = np.array(basis, dtype=np.float64)
        if b.shape != (3, 3):
            raise InputError("basis must be 3x3")
        det = _exact_det(b)
        if abs(det - 1) > tol:
            raise InputError(f"basis is not unimodular (det = {float(det)!r})")
        b.setflags(write=False)
        return cls(b)

    @property
    def det(self) -> float:
        return float(_exact_det(self.basis))

    def systole(self, precision: int | None = None) -> Systole:
        return systole(self, precision)


def _exact_det(b: np.ndarray) -> Fraction:
    m = [[Fraction(float(v)) for v in row] for row in b]
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _provenance_basis(p: Provenance) -> np.ndarray:
    a = float(_fixed(p.alpha, 64)[0]) * 2.0 ** -64
    b = float(_fixed(p.beta, 64)[0]) * 2.0 ** -64
    b_ = flow_matrix(p.s, p.t) @ tau_matrix(a, b)
    b_.setflags(write=False)
    return b_


def tau_lattice(alpha, beta) -> LatticeState:
    """``tau_{alpha,beta} Z^3``: basis columns (1, alpha, beta), e2, e3."""
    p = Provenance(as_spec(alpha), as_spec(beta))
    return LatticeState(_provenance_basis(p), p)


def apply_flow(x: LatticeState, p: FlowParams | tuple) -> LatticeState:
    """``a_{s,t} x``.  Refuses flows beyond the working-precision budget."""
    if not isinstance(p, FlowParams):
        p = FlowParams(*p)
    if x.provenance is not None:
        q = x.provenance
        s, t = q.s + p.s, q.t + p.t
        if s + t > flow_budget():
            raise InputError(f"flow (s, t) = ({s}, {t}) exceeds the precision budget")
        prov = Provenance(q.alpha, q.beta, s, t)
        return LatticeState(_provenance_basis(prov), prov)
    if p.s + p.t > flow_budget():
        raise InputError("flow exceeds the precision budget")
    b = p.matrix() @ x.basis
    b.setflags(write=False)
    return LatticeState(b)


# -- reduction and enumeration --------------------------------------------------

def lll_reduce(b: np.ndarray, delta: float = 0.99) -> tuple[np.ndarray, list[list[int]]]:
    """LLL-reduce the columns of ``b``; returns the reduced basis and the
    integer transform ``U`` with ``reduced = b @ U``."""
    cols = [np.array(b[:, j], dtype=np.float64) for j in range(3)]
    u = [[1 if i == j else 0 for j in range(3)] for i in range(3)]  # columns of U

    def gso():
        bs, mu = [], [[0.0] * 3 for _ in range(3)]
        for i in range(3):
            v = cols[i].copy()
            for j in range(i):
                mu[i][j] = float(cols[i] @ bs[j]) / float(bs[j] @ bs[j])
                v -= mu[i][j] * bs[j]
            bs.append(v)
        return bs, mu

    k, guard = 1, 0
    while k < 3:
        guard += 1
        if guard > 10000:
            raise RuntimeError("LLL did not terminate")
        bs, mu = gso()
        for j in range(k - 1, -1, -1):
            r = round(mu[k][j])
            if r:
                cols[k] = cols[k] - r * cols[j]
                u[k] = [a - r * c for a, c in zip(u[k], u[j])]
                bs, mu = gso()
        if float(bs[k] @ bs[k]) >= (delta - mu[k][k - 1] ** 2) * float(bs[k - 1] @ bs[k - 1]):
            k += 1
        else:
            cols[k], cols[k - 1] = cols[k - 1], cols[k]
            u[k], u[k - 1] = u[k - 1], u[k]
            k = max(k - 1, 1)
    return np.column_stack(cols), [list(r) for r in zip(*u)]


def _matmul_int(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def _canonical(c) -> tuple[int, ...]:
    c = tuple(int(v) for v in c)
    for v in c:
        if v:
            return c if v > 0 else tuple(-w for w in c)
    return c


def _enumerate(b: np.ndarray) -> list[tuple[tuple[int, ...], float, float]]:
    """All nonzero ``c`` (up to sign) that may attain the minimal sup-norm of
    ``b @ c``, with their float norms and error bounds."""
    cols = [b[:, j] for j in range(3)]
    bs, mu = [], [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        v = cols[i].copy()
        for j in range(i):
            mu[i][j] = float(cols[i] @ bs[j]) / float(bs[j] @ bs[j])
            v -= mu[i][j] * bs[j]
        bs.append(v)
    n2 = [float(v @ v) for v in bs]
    colmax = [float(np.max(np.abs(c))) for c in cols]
    best = min(colmax)
    r2 = (3 * best * best) * (1 + 1e-9) + 1e-300
    found = []
    k3 = int(math.floor(math.sqrt(r2 / n2[2])))
    for c3 in range(-k3, k3 + 1):
        rest3 = r2 - c3 * c3 * n2[2]
        if rest3 < 0:
            continue
        ctr2 = -c3 * mu[2][1]
        w2 = math.sqrt(rest3 / n2[1])
        for c2 in range(math.ceil(ctr2 - w2), math.floor(ctr2 + w2) + 1):
            rest2 = rest3 - (c2 - ctr2) ** 2 * n2[1]
            if rest2 < 0:
                continue
            ctr1 = -(c2 * mu[1][0] + c3 * mu[2][0])
            w1 = math.sqrt(rest2 / n2[0])
            for c1 in range(math.ceil(ctr1 - w1), math.floor(ctr1 + w1) + 1):
                if c1 == c2 == c3 == 0:
                    continue
                c = _canonical((c1, c2, c3))
                if c != (c1, c2, c3):
                    continue
                v = c1 * cols[0] + c2 * cols[1] + c3 * cols[2]
                sup = float(np.max(np.abs(v)))
                err = 1e-12 * (abs(c1) * colmax[0] + abs(c2) * colmax[1] + abs(c3) * colmax[2])
                found.append((c, sup, err))
    lo = min(s + e for _, s, e in found)
    return [f for f in found if f[1] - f[2] <= lo]


def _fixed(x: RealSpec, bits: int) -> tuple[int, int]:
    return scaled_floor(x, bits), bits


def _column(p: Provenance, coeff, ex: tuple[float, float, float]) -> np.ndarray:
    n, m1, m2 = coeff
    bits = 64 + abs(n).bit_length() + 8
    out = [ex[0] * n]
    for spec, m, e in ((p.alpha, m1, ex[1]), (p.beta, m2, ex[2])):
        a, _ = _fixed(spec, bits)
        out.append(e * math.ldexp(float(n * a + (m << bits)), -bits))
    return np.array(out)


def _candidates(x: LatticeState) -> list[tuple[int, int, int]]:
    cached = x._cache.get("candidates")
    if cached is not None:
        return cached
    p = x.provenance
    if p is None:
        red, u = lll_reduce(x.basis)
        cs = [_canonical(np.array(u, dtype=object) @ np.array(c, dtype=object))
              for c, _, _ in _enumerate(red)]
    else:
        ex = (math.exp(-p.s - p.t), math.exp(p.s), math.exp(p.t))
        coeffs = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]  # rows i, columns = generators
        for _ in range(40):
            b = np.column_stack([_column(p, [coeffs[i][j] for i in range(3)], ex)
                                 for j in range(3)])
            red, u = lll_reduce(b)
            if u == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]:
                break
            coeffs = _matmul_int(coeffs, u)
        else:
            raise RuntimeError("iterated reduction did not stabilise")
        cs = []
        for c, _, _ in _enumerate(b):
            cs.append(_canonical([sum(coeffs[i][j] * c[j] for j in range(3)) for i in range(3)]))
    cs = sorted(set(cs))
    x._cache["candidates"] = cs
    return cs


def _mpf_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    v = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -v if sign else v


@lru_cache(maxsize=65536)
def _exp_enclosure(x: float, bits: int) -> Interval:
    iv = mpmath.iv
    old = iv.prec
    iv.prec = bits + 8
    try:
        e = iv.exp(iv.mpf(x))._mpi_
    finally:
        iv.prec = old
    return Interval(_mpf_fraction(e[0]), _mpf_fraction(e[1]))


def _certified_norm(x: LatticeState, c, bits: int) -> Interval:
    p = x.provenance
    if p is None:
        comps = [Interval.point(sum(Fraction(float(x.basis[i, j])) * c[j] for j in range(3)))
                 for i in range(3)]
    else:
        n, m1, m2 = c
        nb = bits + abs(n).bit_length() + 4
        comps = [_exp_enclosure(-p.s - p.t, bits) * n]
        for spec, m, e in ((p.alpha, m1, p.s), (p.beta, m2, p.t)):
            a = scaled_floor(spec, nb)
            scale = Fraction(1, 1 << nb)
            lin = Interval(Fraction(n * a + (m << nb)) * scale, Fraction(n * a + n + (m << nb)) * scale) \
                if n >= 0 else Interval(Fraction(n * a + n + (m << nb)) * scale, Fraction(n * a + (m << nb)) * scale)
            comps.append(_exp_enclosure(e, bits).times(lin.abs()))
    comps = [v.abs() for v in comps]
    return Interval(max(v.lo for v in comps), max(v.hi for v in comps))


def systole(x: LatticeState, precision: int | None = None) -> Systole:
    """Nonzero lattice vector of minimal sup-norm, with a certified norm.

    Size reduction (LLL) followed by exhaustive enumeration inside the
    Euclidean ball that must contain every sup-norm minimiser.  Vectors whose
    certified norms cannot be separated from the minimum are returned as ties.
    """
    bits = precision or working_precision()
    key = ("systole", bits)
    if key in x._cache:
        return x._cache[key]
    cands = _candidates(x)
    while True:
        norms = {c: _certified_norm(x, c, bits) for c in cands}
        order = sorted(cands, key=lambda c: (norms[c].hi, sum(map(abs, c)), tuple(-v for v in c)))
        best = order[0]
        ties = tuple(c for c in order[1:] if norms[c].lo <= norms[best].hi)
        fuzzy = any(norms[c].width > 0 for c in (best,) + ties)
        if not ties or not fuzzy or bits >= MAX_BITS or x.provenance is None:
            break
        bits *= 2
    lo = min(norms[c].lo for c in (best,) + ties)
    result = Systole(best, Interval(lo, norms[best].hi), ties)
    x._cache[key] = result
    return result


def in_X_eps(x: LatticeState, eps, max_bits: int = 1024) -> Membership:
    """Whether the lattice has a nonzero vector of sup-norm ``<= eps``."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise InputError("eps must lie in (0, 1/2)")
    bits = working_precision()
    while True:
        c = systole(x, bits).norm.compare(eps)
        if c is not None:
            return Membership(c <= 0)
        if bits >= max_bits:
            return Membership(systole(x, bits).value <= eps, True)
        bits *= 2


class TracePoint(NamedTuple):
    s: float
    t: float
    systole: Systole


def _grid(T: float, h: float) -> list[float]:
    if h <= 0:
        raise InputError("step must be positive")
    k = int(math.floor(T / h + 1e-9))
    return [i * h for i in range(k + 1)]


def _trace_row(args):
    alpha, beta, s, ts = args
    base = tau_lattice(alpha, beta)
    return [TracePoint(s, t, systole(apply_flow(base, (s, t)))) for t in ts]


def orbit_trace(alpha, beta, T: float, h: float, workers: int = 1) -> list[TracePoint]:
    """Systole over the grid ``{0, h, ...}^2`` in ``[0, T]^2``, row-major in ``s``."""
    grid = _grid(T, h) if T >= h else [0.0]
    if len(grid) ** 2 > 10 ** 8:
        raise InputError("grid exceeds 10^8 points")
    alpha, beta = as_spec(alpha), as_spec(beta)
    rows = [(alpha, beta, s, grid) for s in grid]
    from ._parallel import pmap
    return [pt for row in pmap(_trace_row, rows, workers) for pt in row]


def random_unimodular(rng: np.random.Generator, spread: float = 2.0) -> LatticeState:
    """Random unimodular lattice: integer unimodular matrix times a random
    symmetric positive-definite matrix of determinant one."""
    u = np.eye(3, dtype=np.int64)
    for _ in range(6):
        i, j = rng.choice(3, size=2, replace=False)
        e = np.eye(3, dtype=np.int64)
        e[i, j] = rng.integers(-3, 4)
        u = u @ e
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    x = rng.uniform(-spread, spread, size=2)
    d = np.array([x[0], x[1], -x[0] - x[1]])
    p = q @ np.diag(np.exp(d)) @ q.T
    b = p @ u.astype(np.float64)
    b /= np.cbrt(np.linalg.det(b))
    return LatticeState.from_basis(b, tol=1e-9)
