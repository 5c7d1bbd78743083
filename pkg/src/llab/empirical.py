"""Empirical measures along the orbit.

Three quantities are provided:

* certified bounds on the fraction of ``[0, T]^2`` whose flow times put the
  lattice in ``X_eps`` (:func:`escape_fraction`);
* midpoint-rule averages of an observable over the flow box
  (:func:`observable_average`);
* the discrete empirical distribution over the grid ``a_1^m a_2^n x``
  (:func:`discrete_empirical`).

The escape fraction never calls a shortest-vector routine: the set in
question is a union of triangles (one per ``n``), whose area is bounded by an
adaptive quadtree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from ._parallel import pmap
from .lattice import LatticeState, apply_flow, as_spec, in_X_eps, systole, tau_lattice
from .realnum import InputError

__all__ = [
    "AreaBound",
    "Triangle",
    "Constant",
    "IndicatorXEps",
    "SystoleBins",
    "ObservableAverage",
    "GridEmpirical",
    "union_area_bound",
    "lattice_triangles",
    "escape_fraction",
    "escape_fraction_from_state",
    "boundary_cell_fraction",
    "observable_average",
    "discrete_empirical",
]


@dataclass(frozen=True)
class AreaBound:
    lower: float
    upper: float
    depth: int
    unresolved_area: float

    def __contains__(self, x: float) -> bool:
        return self.lower <= x <= self.upper


class Triangle(NamedTuple):
    """``{s <= s_max, t <= t_max, s + t >= hyp}`` with a certified slack."""

    s_max: float
    t_max: float
    hyp: float
    slack: float = 0.0


def _arrays(triangles, T: float):
    cap = 4 * T + 1
    s = np.array([min(tr.s_max, cap) for tr in triangles], dtype=np.float64)
    t = np.array([min(tr.t_max, cap) for tr in triangles], dtype=np.float64)
    h = np.array([max(tr.hyp, -cap) for tr in triangles], dtype=np.float64)
    sl = np.array([tr.slack for tr in triangles], dtype=np.float64)
    return s, t, h, sl


def union_area_bound(triangles: Sequence, T: float, depth: int = 12) -> AreaBound:
    """Bounds on the area fraction of ``[0, T]^2`` covered by ``triangles``.

    Level by level, every (cell, triangle) pair is classified: the cell lies
    inside the (slack-shrunk) triangle, or is separated from the
    (slack-grown) triangle by one of its three edge lines, or neither.
    A cell inside some triangle counts towards the lower bound, a cell
    separated from all of them is dropped, and the rest are split in four.
    Cells still undecided at ``depth`` form the unresolved area.
    """
    if T <= 0:
        raise InputError("T must be positive")
    if depth < 0:
        raise InputError("depth must be >= 0")
    total = T * T
    if not len(triangles):
        return AreaBound(0.0, 0.0, depth, 0.0)
    S, Tt, H, SL = _arrays(triangles, T)
    # cells are integer corners (i, j) at the current level; side = T / 2^level
    ci = np.zeros(1, dtype=np.int64)
    cj = np.zeros(1, dtype=np.int64)
    pc = np.zeros(len(S), dtype=np.int64)  # pair -> cell
    pt = np.arange(len(S), dtype=np.int64)  # pair -> triangle
    inside_cells = 0.0
    for level in range(depth + 1):
        side = T / (1 << level)
        x0 = ci[pc] * side
        y0 = cj[pc] * side
        x1, y1 = x0 + side, y0 + side
        s, t, h, sl = S[pt], Tt[pt], H[pt], SL[pt]
        inside = (x1 <= s - sl) & (y1 <= t - sl) & (x0 + y0 >= h + sl)
        outside = (x0 > s + sl) | (y0 > t + sl) | (x1 + y1 < h - sl)
        ncell = len(ci)
        full = np.zeros(ncell, dtype=bool)
        full[pc[inside]] = True
        inside_cells += float(np.count_nonzero(full)) * side * side
        keep = ~outside & ~full[pc]
        pc, pt = pc[keep], pt[keep]
        live = np.unique(pc)
        if level == depth or not len(live):
            unresolved = float(len(live)) * side * side
            break
        # renumber live cells and split each into four children
        remap = np.full(ncell, -1, dtype=np.int64)
        remap[live] = np.arange(len(live))
        pc = remap[pc]
        ci = np.concatenate([2 * ci[live] + di for di, _ in product((0, 1), repeat=2)])
        cj = np.concatenate([2 * cj[live] + dj for _, dj in product((0, 1), repeat=2)])
        nl = len(live)
        pc = np.concatenate([pc + k * nl for k in range(4)])
        pt = np.tile(pt, 4)
    lower = min(inside_cells / total, 1.0)
    upper = min((inside_cells + unresolved) / total, 1.0)
    return AreaBound(lower, upper, depth, unresolved)


def escape_fraction(alpha, beta, eps, T: float, depth: int = 12, threads: int = 1) -> AreaBound:
    """Certified bounds on ``|{(s,t) in [0,T]^2 : a_{s,t} tau Z^3 in X_eps}| / T^2``."""
    from .excursions import all_excursions

    exc = all_excursions(as_spec(alpha), as_spec(beta), eps, T, threads=threads)
    return union_area_bound(exc, T, depth)


def lattice_triangles(x: LatticeState, eps, T: float, max_box: int = 10 ** 7) -> list[Triangle]:
    """Triangles ``{(s,t) : a_{s,t} v is eps-short}`` for a general lattice.

    Only vectors ``v`` with ``|v_0| <= eps e^{2T}`` and ``|v_1|, |v_2| <= eps``
    can become short inside ``[0, T]^2``; they are found by scanning the
    integer box that contains their coefficients.
    """
    eps = float(Fraction(eps))
    if T <= 0:
        raise InputError("T must be positive")
    b = np.asarray(x.basis, dtype=np.float64)
    radius = np.array([eps * math.exp(2 * T), eps, eps])
    binv = np.linalg.inv(b)
    bound = np.floor(np.abs(binv) @ radius + 1e-9).astype(np.int64)
    if np.prod(2 * bound + 1) > max_box:
        raise InputError("coefficient box too large")
    out = []
    for c in product(*(range(-k, k + 1) for k in bound)):
        if not any(c) or next(v for v in c if v) < 0:
            continue
        v = b @ np.array(c, dtype=np.float64)
        if abs(v[1]) > eps * (1 + 1e-12) or abs(v[2]) > eps * (1 + 1e-12):
            continue
        s_max = math.inf if v[1] == 0 else math.log(eps / abs(v[1]))
        t_max = math.inf if v[2] == 0 else math.log(eps / abs(v[2]))
        hyp = -math.inf if v[0] == 0 else math.log(abs(v[0]) / eps)
        if min(s_max, T) + min(t_max, T) < hyp or min(s_max, t_max) < 0:
            continue
        out.append(Triangle(s_max, t_max, hyp, 1e-12 * (1 + abs(hyp) if math.isfinite(hyp) else 1)))
    return out


def escape_fraction_from_state(x: LatticeState, eps, T: float, depth: int = 12) -> AreaBound:
    """As :func:`escape_fraction`, for an explicit lattice rather than ``tau Z^3``."""
    return union_area_bound(lattice_triangles(x, eps, T), T, depth)


def boundary_cell_fraction(triangles: Sequence, T: float, cells: int) -> float:
    """Fraction of the ``cells x cells`` grid meeting some triangle edge.

    Off these cells the union's indicator is constant, so a midpoint-rule
    average differs from the true area fraction by at most this amount.
    """
    if not len(triangles):
        return 0.0
    S, Tt, H, SL = _arrays(triangles, T)
    side = T / cells
    idx = np.arange(cells, dtype=np.float64) * side
    x0, y0 = np.meshgrid(idx, idx, indexing="ij")
    x0, y0 = x0.ravel(), y0.ravel()
    x1, y1 = x0 + side, y0 + side
    mixed = np.zeros(x0.shape, dtype=bool)
    for s, t, h, sl in zip(S, Tt, H, SL):
        inside = (x1 <= s - sl) & (y1 <= t - sl) & (x0 + y0 >= h + sl)
        outside = (x0 > s + sl) | (y0 > t + sl) | (x1 + y1 < h - sl)
        mixed |= ~inside & ~outside
    return float(np.count_nonzero(mixed)) / x0.size


# -- observables ------------------------------------------------------------

class Constant:
    """The constant function ``c`` (one bin)."""

    def __init__(self, c: float = 1.0):
        self.c = c
        self.labels = ("const",)
        self.values = (c,)

    def __call__(self, x: LatticeState) -> int:
        return 0


class IndicatorXEps:
    """``1`` on ``X_eps``: bin 1 when the systole is ``<= eps``."""

    def __init__(self, eps):
        self.eps = Fraction(eps)
        self.labels = ("outside", "inside")
        self.values = (0.0, 1.0)

    def __call__(self, x: LatticeState) -> int:
        return int(in_X_eps(x, self.eps).inside)


class SystoleBins:
    """Bin ``i`` holds systoles in ``(r_{i-1}, r_i]``; the last bin is ``> r_max``."""

    def __init__(self, thresholds: Sequence):
        th = [Fraction(r) for r in thresholds]
        if not th or sorted(set(th)) != th or th[0] <= 0:
            raise InputError("thresholds must be positive and strictly increasing")
        self.thresholds = tuple(th)
        self.labels = tuple(f"<={float(r):g}" for r in th) + (f">{float(th[-1]):g}",)
        self.values = None

    def __call__(self, x: LatticeState) -> int:
        norm = systole(x).norm
        for i, r in enumerate(self.thresholds):
            c = norm.compare(r)
            if c is None:
                c = -1 if norm.mid <= r else 1
            if c <= 0:
                return i
        return len(self.thresholds)


@dataclass(frozen=True)
class ObservableAverage:
    labels: tuple
    masses: tuple
    cells: int
    step: float
    delta: float | None = None
    values: tuple | None = None

    @property
    def mean(self) -> float | None:
        """Average of the observable's numeric values (``None`` for pure binnings)."""
        if self.values is None:
            return None
        return math.fsum(v * m for v, m in zip(self.values, self.masses))

    def mass(self, label) -> float:
        return self.masses[self.labels.index(label)]


def _row(args):
    alpha, beta, obs, s, ts = args
    base = tau_lattice(alpha, beta)
    return [obs(apply_flow(base, (s, t))) for t in ts]


def _midpoint_masses(alpha, beta, T, cells, obs, workers):
    side = T / cells
    mids = [(i + 0.5) * side for i in range(cells)]
    rows = pmap(_row, [(alpha, beta, obs, s, mids) for s in mids], workers)
    counts = np.zeros(len(obs.labels), dtype=np.int64)
    for r in rows:
        counts += np.bincount(r, minlength=len(obs.labels))
    # integer counts make the sum exact and order independent
    return tuple(float(Fraction(int(c), cells * cells)) for c in counts)


def observable_average(alpha, beta, T: float, h: float, observable, diagnose: bool = True,
                       workers: int = 1) -> ObservableAverage:
    """Midpoint-rule average of ``observable`` over ``[0, T]^2``.

    The box is cut into ``round(T / h)`` squares per side.  With ``diagnose``
    the average is recomputed at half the step and ``delta`` holds the
    largest change over the bins.
    """
    if T <= 0 or h <= 0:
        raise InputError("T and h must be positive")
    cells = max(1, round(T / h))
    if (2 * cells if diagnose else cells) ** 2 > 10 ** 8:
        raise InputError("grid exceeds 10^8 points")
    alpha, beta = as_spec(alpha), as_spec(beta)
    m = _midpoint_masses(alpha, beta, T, cells, observable, workers)
    delta = None
    if diagnose:
        m2 = _midpoint_masses(alpha, beta, T, 2 * cells, observable, workers)
        delta = max(abs(a - b) for a, b in zip(m, m2))
    return ObservableAverage(tuple(observable.labels), m, cells, T / cells, delta, observable.values)


# -- discrete empirical measure ---------------------------------------------

@dataclass(frozen=True)
class GridEmpirical:
    """Bins of ``a_1^m a_2^n x`` for ``0 <= m, n < N``.

    ``bins[n][m]`` is the bin index at that grid point.
    """

    N: int
    labels: tuple
    bins: tuple

    @property
    def distribution(self) -> tuple[Fraction, ...]:
        k = len(self.labels)
        counts = [0] * k
        for row in self.bins:
            for b in row:
                counts[b] += 1
        return tuple(Fraction(c, self.N * self.N) for c in counts)

    def row_distribution(self, n: int) -> tuple[Fraction, ...]:
        k = len(self.labels)
        counts = [0] * k
        for b in self.bins[n]:
            counts[b] += 1
        return tuple(Fraction(c, self.N) for c in counts)

    @property
    def row_distributions(self) -> list[tuple[Fraction, ...]]:
        return [self.row_distribution(n) for n in range(self.N)]


def _discrete_row(args):
    x0, obs, n, N = args
    return tuple(obs(apply_flow(x0, (m, n))) for m in range(N))


def discrete_empirical(x0: LatticeState, N: int, observable, workers: int = 1) -> GridEmpirical:
    """Observable bins over the ``N x N`` grid of ``a_1 = a_{1,0}``, ``a_2 = a_{0,1}``."""
    if not 1 <= N <= 10 ** 4:
        raise InputError("N must lie in [1, 10^4]")
    # fail fast on the far corner before doing any work
    apply_flow(x0, (N - 1, N - 1))
    rows = pmap(_discrete_row, [(x0, observable, n, N) for n in range(N)], workers)
    return GridEmpirical(N, tuple(observable.labels), tuple(rows))
