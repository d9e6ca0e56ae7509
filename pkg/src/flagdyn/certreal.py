"""Certified real arithmetic on dyadic intervals.

Every quantity of interest here (logarithms of algebraic numbers, angles
between rational subspaces) is represented by an interval [lo, hi] with
dyadic rational endpoints that provably contains the true value.  The
elementary functions are evaluated by rational series with explicit tail
bounds and outward rounding, so no floating-point hardware is trusted
anywhere.

Argument reductions used:

  ln x   = k ln 2 + 2 atanh((m-1)/(m+1)),   x = 2^k m,  m in [2/3, 4/3)
  ln 2   = 2 atanh(1/3)
  pi     = 4 (4 atan(1/5) - atan(1/239))          (Machin)
  atan x = 2 atan(x / (1 + sqrt(1 + x^2)))        (halving, applied twice)
  acos c = atan(sqrt(1-c^2)/c)  or  pi/2 - atan(c/sqrt(1-c^2))

atanh is summed with its positive-term geometric tail bound, atan with the
alternating-series bound.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import PrecisionError

DEFAULT_BITS = 64
MAX_BITS = 4096


def round_down(x: Fraction, bits: int) -> Fraction:
    """Largest multiple of 2^-bits that is <= x."""
    scaled = x * (1 << bits)
    return Fraction(math.floor(scaled), 1 << bits)


def round_up(x: Fraction, bits: int) -> Fraction:
    scaled = x * (1 << bits)
    return Fraction(math.ceil(scaled), 1 << bits)


class Interval:
    """A closed interval with exact rational endpoints, lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = Fraction(lo)
        hi = lo if hi is None else Fraction(hi)
        if lo > hi:
            raise ValueError(f"inverted interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    # -- structure ----------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __repr__(self):
        return f"Interval({float(self.lo):.12g}, {float(self.hi):.12g})"

    def __eq__(self, other):
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def certainly_gt(self, x) -> bool:
        return self.lo > Fraction(x)

    def certainly_lt(self, x) -> bool:
        return self.hi < Fraction(x)

    def rounded(self, bits: int) -> "Interval":
        return Interval(round_down(self.lo, bits), round_up(self.hi, bits))

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other):
        other = _as_interval(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other):
        other = _as_interval(other)
        prods = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ]
        return Interval(min(prods), max(prods))

    __radd__ = __add__
    __rmul__ = __mul__

    def scale(self, c) -> "Interval":
        c = Fraction(c)
        if c >= 0:
            return Interval(self.lo * c, self.hi * c)
        return Interval(self.hi * c, self.lo * c)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> "Interval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("empty intersection")
        return Interval(lo, hi)

    def to_json(self) -> list[str]:
        from .qlinalg import rat_str

        return [rat_str(self.lo), rat_str(self.hi)]


def _as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval(Fraction(x))


def iv_sum(intervals) -> Interval:
    total = Interval(0)
    for iv in intervals:
        total = total + iv
    return total


# -- square roots -------------------------------------------------------------


def sqrt_down(x: Fraction, bits: int) -> Fraction:
    """Dyadic lower bound on sqrt(x) for x >= 0, error < 2^-bits."""
    if x < 0:
        raise ValueError("sqrt of negative rational")
    if x == 0:
        return Fraction(0)
    # floor(sqrt(x * 4^bits)) / 2^bits <= sqrt(x)
    n = (x.numerator << (2 * bits)) // x.denominator
    return Fraction(math.isqrt(n), 1 << bits)


def sqrt_up(x: Fraction, bits: int) -> Fraction:
    if x < 0:
        raise ValueError("sqrt of negative rational")
    if x == 0:
        return Fraction(0)
    n = -((-x.numerator << (2 * bits)) // x.denominator)  # ceil scale
    r = math.isqrt(n)
    if r * r < n:
        r += 1
    return Fraction(r, 1 << bits)


def iv_sqrt(iv: Interval, bits: int = DEFAULT_BITS) -> Interval:
    return Interval(sqrt_down(iv.lo, bits), sqrt_up(max(iv.hi, Fraction(0)), bits))


# -- logarithms ----------------------------------------------------------------


def _atanh_series(u: Fraction, bits: int) -> Interval:
    """Enclosure of atanh(u) for |u| <= 1/2 with geometric tail bound."""
    u2 = u * u
    term = u
    total = Fraction(0)
    k = 0
    tol = Fraction(1, 1 << (bits + 2))
    while True:
        total += term / (2 * k + 1)
        k += 1
        term *= u2
        # remaining terms bounded by |term|/(2k+1) * 1/(1-u^2)
        tail = abs(term) / ((2 * k + 1) * (1 - u2))
        if tail < tol:
            break
        if k > 4 * bits + 64:
            raise PrecisionError("atanh series failed to converge")
    if u >= 0:
        return Interval(total, total + tail)
    return Interval(total - tail, total)


@lru_cache(maxsize=None)
def ln2_interval(bits: int = DEFAULT_BITS) -> Interval:
    return (_atanh_series(Fraction(1, 3), bits + 4).scale(2)).rounded(bits)


def ln_frac(x: Fraction, bits: int = DEFAULT_BITS) -> Interval:
    """Certified enclosure of ln(x) for a positive rational x."""
    if x <= 0:
        raise ValueError("ln of nonpositive rational")
    if x == 1:
        return Interval(0)
    m, k = x, 0
    while m >= Fraction(4, 3):
        m /= 2
        k += 1
    while m < Fraction(2, 3):
        m *= 2
        k -= 1
    u = (m - 1) / (m + 1)  # |u| <= 1/5
    core = _atanh_series(u, bits + 4).scale(2)
    if k:
        core = core + ln2_interval(bits + 4).scale(k)
    return core.rounded(bits)


def iv_ln(iv: Interval, bits: int = DEFAULT_BITS) -> Interval:
    """Monotone image: [ln lo, ln hi], endpoints rounded outward."""
    if iv.lo <= 0:
        raise ValueError("ln of interval touching zero")
    return Interval(ln_frac(iv.lo, bits).lo, ln_frac(iv.hi, bits).hi)


# -- arctangent and pi -----------------------------------------------------------


def _atan_series(u: Fraction, bits: int) -> Interval:
    """Enclosure of atan(u) for |u| < 1/2 via the alternating series."""
    u2 = u * u
    term = u
    total = Fraction(0)
    k = 0
    tol = Fraction(1, 1 << (bits + 2))
    while True:
        total += term / (2 * k + 1) if k % 2 == 0 else -term / (2 * k + 1)
        k += 1
        term *= u2
        tail = abs(term) / (2 * k + 1)
        if tail < tol:
            break
        if k > 4 * bits + 64:
            raise PrecisionError("atan series failed to converge")
    return Interval(total - tail, total + tail)


@lru_cache(maxsize=None)
def pi_interval(bits: int = DEFAULT_BITS) -> Interval:
    a = _atan_series(Fraction(1, 5), bits + 8)
    b = _atan_series(Fraction(1, 239), bits + 8)
    return (a.scale(16) - b.scale(4)).rounded(bits)


def atan_frac(x: Fraction, bits: int = DEFAULT_BITS) -> Interval:
    """Certified enclosure of atan(x) for any rational x."""
    if x < 0:
        return -atan_frac(-x, bits)
    if x > 1:
        return (pi_interval(bits + 4).scale(Fraction(1, 2)) - atan_frac(1 / x, bits + 4)).rounded(bits)
    # two halvings bring the argument below tan(pi/8) ~ 0.414, then ~0.21
    work = bits + 8
    u = Interval(x)
    halvings = 0
    while u.hi >= Fraction(1, 4):
        s = iv_sqrt(Interval(1) + u * u, work)
        u = _iv_div(u, Interval(1) + s, work)
        halvings += 1
        if halvings > 8:
            raise PrecisionError("atan argument reduction failed")
    lo = _atan_series(u.lo, work).lo
    hi = _atan_series(u.hi, work).hi
    return Interval(lo, hi).scale(1 << halvings).rounded(bits)


def _iv_div(a: Interval, b: Interval, bits: int) -> Interval:
    if b.lo <= 0 <= b.hi:
        raise ValueError("interval division by an interval containing 0")
    quots = [a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi]
    return Interval(min(quots), max(quots)).rounded(bits + 16)


def iv_atan(iv: Interval, bits: int = DEFAULT_BITS) -> Interval:
    return Interval(atan_frac(iv.lo, bits).lo, atan_frac(iv.hi, bits).hi)


def acos_frac(c: Fraction, bits: int = DEFAULT_BITS) -> Interval:
    """Certified enclosure of acos(c) for rational c in [-1, 1]."""
    if not -1 <= c <= 1:
        raise ValueError("acos argument out of [-1, 1]")
    if c < 0:
        return (pi_interval(bits + 4) - acos_frac(-c, bits + 4)).rounded(bits)
    if c == 0:
        return pi_interval(bits + 1).scale(Fraction(1, 2)).rounded(bits)
    if c == 1:
        return Interval(0)
    work = bits + 8
    s = iv_sqrt(Interval(1 - c * c), work)  # sin of the angle
    if c >= Fraction(1, 2):
        ratio = _iv_div(s, Interval(c), work)
        return iv_atan(ratio, work).rounded(bits)
    ratio = _iv_div(Interval(c), s, work)
    half_pi = pi_interval(work).scale(Fraction(1, 2))
    return (half_pi - iv_atan(ratio, work)).rounded(bits)


def iv_acos(iv: Interval, bits: int = DEFAULT_BITS) -> Interval:
    """Monotone decreasing image: [acos hi, acos lo]."""
    lo = acos_frac(min(iv.hi, Fraction(1)), bits).lo
    hi = acos_frac(max(iv.lo, Fraction(-1)), bits).hi
    return Interval(lo, hi)
