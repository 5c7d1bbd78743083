"""Exact and certified real arithmetic for the inputs alpha and beta.

Every number is a :class:`RealSpec`; evaluating it at precision ``P`` gives a
closed :class:`Interval` of rationals of width at most ``2**-P`` that contains
the true value.  Nothing here relies on binary floats for a decision.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import mpmath
import numpy as np

__all__ = [
    "InputError",
    "Interval",
    "RealSpec",
    "Rational",
    "Surd",
    "Decimal",
    "ContinuedFraction",
    "CF",
    "FracStream",
    "parse_number",
    "parse_rational",
    "real_root_decimal",
    "eval_interval",
    "scaled_floor",
    "nearest_integer",
    "nearest_distance",
    "littlewood_value",
    "compare_littlewood",
    "partial_quotients",
    "convergents",
]

MAX_BITS = 1 << 14


class InputError(ValueError):
    """Malformed number specification or violated precondition."""


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __mul__(self, k):
        k = Fraction(k)
        if k >= 0:
            return Interval(self.lo * k, self.hi * k)
        return Interval(self.hi * k, self.lo * k)

    __rmul__ = __mul__

    def __add__(self, k):
        if isinstance(k, Interval):
            return Interval(self.lo + k.lo, self.hi + k.hi)
        k = Fraction(k)
        return Interval(self.lo + k, self.hi + k)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, k):
        return self + (-k)

    def times(self, other: "Interval") -> "Interval":
        """Product of two intervals with non-negative endpoints."""
        if self.lo < 0 or other.lo < 0:
            ps = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
            return Interval(min(ps), max(ps))
        return Interval(self.lo * other.lo, self.hi * other.hi)

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(Fraction(0), max(-self.lo, self.hi))

    def floats(self) -> tuple[float, float]:
        """Outward-rounded float endpoints."""
        lo, hi = float(self.lo), float(self.hi)
        if Fraction(lo) > self.lo:
            lo = math.nextafter(lo, -math.inf)
        if Fraction(hi) < self.hi:
            hi = math.nextafter(hi, math.inf)
        return lo, hi

    def compare(self, x) -> int | None:
        """-1 if entirely below ``x``, +1 if entirely above, 0 if the point ``x``.

        ``None`` when the interval straddles ``x`` and is not degenerate.
        """
        if self.hi < x:
            return -1
        if self.lo > x:
            return 1
        if self.lo == self.hi == x:
            return 0
        return None


class RealSpec:
    """Base class of the number variants."""

    def interval(self, precision: int) -> Interval:
        raise NotImplementedError

    @property
    def is_rational(self) -> bool:
        return False

    def exact(self) -> Fraction | None:
        """The exact value when it is rational, else ``None``."""
        return None


@dataclass(frozen=True)
class Rational(RealSpec):
    p: int
    q: int = 1

    def __post_init__(self):
        if self.q == 0:
            raise InputError("rational with zero denominator")
        f = Fraction(self.p, self.q)
        object.__setattr__(self, "p", f.numerator)
        object.__setattr__(self, "q", f.denominator)

    def interval(self, precision: int) -> Interval:
        return Interval.point(Fraction(self.p, self.q))

    @property
    def is_rational(self) -> bool:
        return True

    def exact(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self):
        return f"rat:{self.p}/{self.q}"


def _squarefree_split(d: int) -> tuple[int, int]:
    """Return (k, f) with d = k*k*f and f squarefree."""
    k, f, p = 1, d, 2
    while p * p <= f:
        while f % (p * p) == 0:
            f //= p * p
            k *= p
        p += 1
    return k, f


@dataclass(frozen=True)
class Surd(RealSpec):
    """The quadratic irrational ``(a + b*sqrt(d)) / c`` in normal form.

    Normal form: ``c > 0``, ``d`` squarefree, ``gcd(a, b, c) == 1``.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if c == 0:
            raise InputError("surd with zero denominator")
        if d <= 0:
            raise InputError("surd radicand must be positive")
        if math.isqrt(d) ** 2 == d:
            raise InputError(f"surd radicand {d} is a perfect square")
        k, d = _squarefree_split(d)
        b *= k
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)
        object.__setattr__(self, "d", d)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def exact(self):
        return Fraction(self.a, self.c) if self.b == 0 else None

    def interval(self, precision: int) -> Interval:
        scale = 1 << precision
        r = math.isqrt(self.b * self.b * self.d * scale * scale)
        if self.b == 0:
            return Interval.point(Fraction(self.a, self.c))
        if self.b > 0:
            lo_num, hi_num = r, r + 1
        else:
            lo_num, hi_num = -(r + 1), -r
        den = self.c * scale
        return Interval(Fraction(self.a * scale + lo_num, den),
                        Fraction(self.a * scale + hi_num, den))

    def __str__(self):
        return f"surd:({self.a}+{self.b}*sqrt({self.d}))/{self.c}"


@dataclass(frozen=True)
class Decimal(RealSpec):
    """A decimal string standing for a real number known to ``bits`` bits.

    The value used in all arithmetic is the written decimal itself.  Decimals
    are accepted wherever an irrational input is required: they are how cubic
    irrationals enter the program (see :func:`real_root_decimal`).
    """

    text: str
    bits: int = 0

    def __post_init__(self):
        try:
            v = Fraction(self.text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad decimal {self.text!r}") from exc
        if self.bits <= 0:
            digits = len(re.sub(r"[^0-9]", "", self.text.split("e")[0].split("E")[0]))
            object.__setattr__(self, "bits", max(1, int(digits * math.log2(10))))
        object.__setattr__(self, "_value", v)

    def interval(self, precision: int) -> Interval:
        return Interval.point(self._value)

    def exact(self) -> Fraction:
        return self._value

    def __str__(self):
        return f"dec:{self.text}"


@dataclass(frozen=True)
class ContinuedFraction(RealSpec):
    """``[a0; a1, a2, ...]`` given by a finite head and an optional periodic tail."""

    head: tuple = ()
    period: tuple = ()

    def __post_init__(self):
        head, period = tuple(int(a) for a in self.head), tuple(int(a) for a in self.period)
        if not head and not period:
            raise InputError("empty continued fraction")
        terms = head + period
        if any(a < 1 for a in terms[1:]):
            raise InputError("partial quotients after the first must be >= 1")
        if not head and period[0] < 1:
            raise InputError("partial quotients after the first must be >= 1")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "period", period)

    @property
    def is_rational(self) -> bool:
        return not self.period

    def exact(self):
        if self.period:
            return None
        p, q = _convergent_pairs(self.terms())
        return Fraction(p[-1], q[-1])

    def terms(self) -> Iterator[int]:
        yield from self.head
        while self.period:
            yield from self.period

    def interval(self, precision: int) -> Interval:
        bound = Fraction(1, 1 << precision)
        prev = None
        for p, q in _iter_convergents(self.terms()):
            if prev is not None and Fraction(1, prev[1] * q) <= bound:
                a, b = Fraction(*prev), Fraction(p, q)
                return Interval(min(a, b), max(a, b))
            prev = (p, q)
        return Interval.point(Fraction(*prev))

    def __str__(self):
        s = "cf:[" + str(self.head[0] if self.head else self.period[0])
        rest = self.head[1:] if self.head else ()
        if rest:
            s += ";" + ",".join(map(str, rest))
        s += "]"
        if self.period:
            s += "|periodic:[" + ",".join(map(str, self.period)) + "]"
        return s


CF = ContinuedFraction


def _iter_convergents(terms) -> Iterator[tuple[int, int]]:
    h0, h1, k0, k1 = 0, 1, 1, 0
    for a in terms:
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield h1, k1


def _convergent_pairs(terms):
    ps, qs = [], []
    for p, q in _iter_convergents(terms):
        ps.append(p)
        qs.append(q)
    return ps, qs


@lru_cache(maxsize=4096)
def eval_interval(x: RealSpec, precision: int) -> Interval:
    """Certified enclosure of ``x`` with width at most ``2**-precision``."""
    if precision < 1:
        raise InputError("precision must be >= 1")
    return x.interval(precision)


def scaled_floor(x: RealSpec, bits: int) -> int:
    """An integer ``A`` with ``x`` in ``[A, A + 1] / 2**bits``."""
    iv = eval_interval(x, bits + 2)
    lo = iv.lo * (1 << bits)
    return lo.numerator // lo.denominator


# -- number input grammar -----------------------------------------------------

_SURD_RE = re.compile(
    r"^\(?\s*([+-]?\d+)?\s*([+-])?\s*(\d+)?\s*\*?\s*sqrt\(\s*(\d+)\s*\)\s*\)?\s*(?:/\s*([+-]?\d+))?$"
)


def parse_rational(text: str) -> Fraction:
    """Parse a threshold such as ``0.15``, ``3/20`` or ``rat:3/20`` exactly."""
    text = text.strip()
    for prefix in ("rat:", "dec:"):
        if text.startswith(prefix):
            text = text[len(prefix):]
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def _int_list(body: str) -> list[int]:
    body = body.strip()
    if not body:
        return []
    return [int(v) for v in re.split(r"[,;\s]+", body) if v]


def parse_number(text: str) -> RealSpec:
    """Parse ``dec:``, ``rat:``, ``surd:`` and ``cf:`` number specs.

    >>> parse_number("surd:(1+1*sqrt(5))/2")
    Surd(a=1, b=1, c=2, d=5)
    >>> str(parse_number("cf:[1;2]|periodic:[2]"))
    'cf:[1;2]|periodic:[2]'
    """
    text = text.strip()
    kind, _, body = text.partition(":")
    try:
        if kind == "dec":
            if "@" in body:
                body, bits = body.split("@")
                return Decimal(body, int(bits))
            return Decimal(body)
        if kind == "rat":
            p, _, q = body.partition("/")
            return Rational(int(p), int(q) if q else 1)
        if kind == "surd":
            m = _SURD_RE.match(body.replace(" ", ""))
            if not m:
                raise InputError(f"bad surd {body!r}")
            a, sign, b, d, c = m.groups()
            b = int(b) if b else 1
            if sign == "-":
                b = -b
            return Surd(int(a) if a else 0, b, int(c) if c else 1, int(d))
        if kind == "cf":
            main, _, tail = body.partition("|")
            m = re.fullmatch(r"\s*\[\s*([+-]?\d+)\s*(?:;([^\]]*))?\]\s*", main)
            if not m:
                raise InputError(f"bad continued fraction {body!r}")
            head = [int(m.group(1))] + _int_list(m.group(2) or "")
            period: list[int] = []
            if tail:
                pm = re.fullmatch(r"\s*periodic:\[([^\]]*)\]\s*", tail)
                if not pm:
                    raise InputError(f"bad periodic tail {tail!r}")
                period = _int_list(pm.group(1))
            return ContinuedFraction(tuple(head), tuple(period))
    except InputError:
        raise
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad number spec {text!r}: {exc}") from exc
    raise InputError(f"unknown number kind in {text!r}")


def real_root_decimal(coeffs: Sequence[int], guess: float, bits: int = 256) -> Decimal:
    """Decimal enclosure of a real polynomial root, e.g. the plastic number.

    ``coeffs`` are highest degree first.  The returned decimal carries
    ``bits`` correct bits (plus guard digits).
    """
    digits = int(bits * math.log10(2)) + 10
    with mpmath.workdps(digits + 20):
        root = mpmath.findroot(lambda z: mpmath.polyval(list(coeffs), z), guess)
        text = mpmath.nstr(root, digits, strip_zeros=False)
    return Decimal(text, bits)


# -- nearest integers and the Littlewood product -------------------------------

def nearest_integer(x: RealSpec, n: int = 1, precision: int = 64) -> tuple[int, Interval]:
    """Nearest integer ``m`` to ``n*x`` and a certified enclosure of ``<n x>``.

    The integer is decided exactly: the enclosure is refined until it excludes
    every half-integer.  An exact tie (rational input only) resolves downward.
    """
    bits = precision + abs(n).bit_length() + 2
    while True:
        iv = eval_interval(x, bits) * n
        lo2, hi2 = 2 * iv.lo, 2 * iv.hi
        # half-integers k + 1/2 correspond to odd integers 2k+1
        odd = -((-lo2.numerator) // lo2.denominator)
        if odd % 2 == 0:
            odd += 1
        if odd > hi2 or iv.width == 0 or bits > MAX_BITS:
            break
        bits *= 2
    mid = iv.lo
    m = math.floor(mid + Fraction(1, 2))
    if iv.width == 0 and mid - math.floor(mid) == Fraction(1, 2):
        m = math.floor(mid)
    return m, (iv - m).abs()


def nearest_distance(x, n: int = 1, precision: int = 64):
    """``<n x>``, the distance from ``n*x`` to the nearest integer.

    A :class:`RealSpec` gives a certified :class:`Interval`; plain ints,
    Fractions and floats give a number of the same kind.

    >>> nearest_distance(0.5), nearest_distance(3.0)
    (0.5, 0.0)
    """
    if isinstance(x, RealSpec):
        return nearest_integer(x, n, precision)[1]
    y = x * n
    if isinstance(y, float):
        return abs(y - round(y))
    y = Fraction(y)
    return abs(y - math.floor(y + Fraction(1, 2)))


def littlewood_value(n: int, alpha: RealSpec, beta: RealSpec, precision: int = 64) -> Interval:
    """Certified enclosure of ``n <n alpha> <n beta>``, width <= ``2**-precision``."""
    if n < 1:
        raise InputError("n must be positive")
    inner = precision + n.bit_length() + 3
    d1 = nearest_integer(alpha, n, inner)[1]
    d2 = nearest_integer(beta, n, inner)[1]
    return d1.times(d2) * n


def compare_littlewood(n: int, alpha: RealSpec, beta: RealSpec, threshold,
                       max_bits: int = 4096) -> int | None:
    """Sign of ``n<n alpha><n beta> - threshold``; ``None`` if undecidable."""
    threshold = Fraction(threshold)
    bits = 64
    while bits <= max_bits:
        c = littlewood_value(n, alpha, beta, bits).compare(threshold)
        if c is not None:
            return c
        bits *= 2
    return None


# -- continued fractions -------------------------------------------------------

def partial_quotients(x: RealSpec, k: int) -> list[int]:
    """First ``k`` partial quotients of ``x`` (fewer if ``x`` is rational)."""
    if isinstance(x, ContinuedFraction):
        out = []
        for a in x.terms():
            if len(out) == k:
                break
            out.append(a)
        return out
    exact = x.exact()
    if exact is not None:
        out = []
        while len(out) < k:
            a = exact.numerator // exact.denominator
            out.append(a)
            exact -= a
            if exact == 0:
                break
            exact = 1 / exact
        return out
    bits = 64
    while True:
        iv = eval_interval(x, bits)
        lo, hi = iv.lo, iv.hi
        out = []
        while len(out) < k:
            a_lo, a_hi = math.floor(lo), math.floor(hi)
            if a_lo != a_hi or lo == a_lo:
                break
            out.append(a_lo)
            lo, hi = 1 / (hi - a_lo), 1 / (lo - a_lo)
        if len(out) == k:
            return out
        bits *= 2
        if bits > MAX_BITS:
            raise InputError("partial quotients not resolvable at maximum precision")


def convergents(x: RealSpec, k: int) -> list[tuple[int, int]]:
    """First ``k`` convergents ``(p_i, q_i)`` of ``x``.

    The list is shorter than ``k`` exactly when ``x`` is rational and its
    continued fraction is exhausted.

    >>> convergents(Rational(1, 3), 5)
    [(0, 1), (1, 3)]
    """
    return list(_iter_convergents(partial_quotients(x, k)))


# -- streaming fractional parts ------------------------------------------------

_MASK32 = np.uint64(0xFFFFFFFF)


@dataclass
class FracStream:
    """Fixed-point tracker of ``frac(n*alpha)`` with ``F`` fractional bits.

    The state is an integer in ``[0, 2**F)``; one step adds the truncated
    fixed-point value of ``frac(alpha)``.  ``error`` bounds, in units of
    ``2**-F`` and in circle distance, how far ``state / 2**F`` may be from
    ``frac(n*alpha)``.
    """

    base: RealSpec
    start: int = 0
    F: int = 96
    n: int = field(init=False)
    state: int = field(init=False)
    error: int = field(init=False)
    step: int = field(init=False)

    def __post_init__(self):
        if self.F != 96:
            raise InputError("only F = 96 is supported by the block kernel")
        mod = 1 << self.F
        self.step = scaled_floor(self.base, self.F) % mod
        self.n = self.start
        self.state = self._seed(self.start)
        self.error = 2

    def _seed(self, n: int) -> int:
        if n == 0:
            return 0
        extra = abs(n).bit_length() + 8
        return (scaled_floor(self.base, self.F + extra) * n >> extra) % (1 << self.F)

    def advance(self, k: int = 1) -> None:
        """Move ``k`` steps forward; identical to ``k`` single additions."""
        self.state = (self.state + k * self.step) % (1 << self.F)
        self.n += k
        self.error += k

    def fraction(self) -> Fraction:
        return Fraction(self.state, 1 << self.F)

    def block(self, length: int) -> tuple[np.ndarray, np.ndarray]:
        """Nearest-integer distances for indices ``n+1 .. n+length``.

        Returns ``(dist, err)`` as float64 arrays; ``err`` is a rigorous bound
        on ``|dist - <k alpha>|`` including the float conversion.  The stream
        advances by ``length``.
        """
        if length >= 1 << 21:
            raise InputError("block length must be < 2**21")
        j = np.arange(1, length + 1, dtype=np.uint64)
        s = self.state
        a0, a1, a2 = (np.uint64((self.step >> (32 * i)) & 0xFFFFFFFF) for i in range(3))
        s0, s1, s2 = (np.uint64((s >> (32 * i)) & 0xFFFFFFFF) for i in range(3))
        l0 = s0 + j * a0
        l1 = s1 + j * a1 + (l0 >> np.uint64(32))
        l0 &= _MASK32
        l2 = (s2 + j * a2 + (l1 >> np.uint64(32))) & _MASK32
        l1 &= _MASK32
        hi = (l2 << np.uint64(32)) | l1
        upper = (hi >> np.uint64(63)).astype(bool)
        # 2**96 - state for the upper half, with borrow from the low limb
        c_lo = np.where(l0 == 0, np.uint64(0), np.uint64(1 << 32) - l0)
        c_hi = ~hi + (l0 == 0).astype(np.uint64)
        top = np.where(upper, c_hi, hi).astype(np.float64)
        low = np.where(upper, c_lo, l0).astype(np.float64)
        dist = top * 2.0 ** -64 + low * 2.0 ** -96
        err = dist * 2.0 ** -51 + (self.error + j.astype(np.float64)) * 2.0 ** -96
        self.advance(length)
        return dist, err
