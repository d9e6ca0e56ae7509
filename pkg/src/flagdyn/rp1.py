"""An exact chart for the real projective line.

Points of RP^1 are lines in the plane; we order them by the angle
theta in [0, pi) of a canonical representative vector.  The point (1:0)
sits at theta = 0 and an affine point with chart coordinate xi (the line
through (xi, 1)) sits at theta = acot(xi), so theta increases as xi
decreases.  All order decisions reduce to exact sign computations of 2x2
determinants of canonical representatives.

Coordinates live in a real quadratic extension Q(sqrt(D)): the fixed
points of an integer hyperbolic matrix are quadratic irrationalities, and
arithmetic in the field keeps every membership and ordering decision
exact.  Rational points are the D = 0 case.

Arcs go from ``start`` to ``end`` in the positive (increasing theta)
direction, with independent open/closed flags per endpoint.  Membership,
images under invertible projective maps, complements, disjointness and
covering multiplicity are all decided exactly; interior sample points of
circular gaps are obtained from the mediant of the bounding
representatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import sympy

from .certreal import Interval, acos_frac, iv_sqrt, sqrt_down, sqrt_up
from .errors import InputError, SingularMatrixError
from .qlinalg import QMatrix


@lru_cache(maxsize=256)
def square_split(n: int) -> tuple[int, int]:
    """n = s^2 * d with d squarefree (n >= 0); returns (s, d)."""
    if n < 0:
        raise ValueError("square_split expects a nonnegative integer")
    if n == 0:
        return (0, 1)
    s, d = 1, 1
    for prime, exp in sympy.factorint(n).items():
        s *= prime ** (exp // 2)
        if exp % 2:
            d *= prime
    return (s, d)


class QuadVal:
    """An element a + b*sqrt(disc) of a real quadratic extension of Q.

    ``disc`` is a squarefree integer >= 2, or 0 for plain rationals
    (in which case b = 0).  Mixed-field arithmetic is only defined when
    one side is rational or the discriminants agree.
    """

    __slots__ = ("a", "b", "disc")

    def __init__(self, a, b=0, disc=0):
        a, b = Fraction(a), Fraction(b)
        if b == 0:
            disc = 0
        elif disc <= 1:
            raise ValueError("irrational part requires a squarefree disc >= 2")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "disc", disc)

    def __setattr__(self, name, value):
        raise AttributeError("QuadVal is immutable")

    @classmethod
    def sqrt_of(cls, q: Fraction) -> "QuadVal":
        """Exact square root of a nonnegative rational as a field element."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("negative radicand")
        s_num, d_num = square_split(q.numerator * q.denominator)
        # sqrt(n/m) = sqrt(n m)/m
        if d_num == 1:
            return cls(Fraction(s_num, q.denominator))
        return cls(0, Fraction(s_num, q.denominator), d_num)

    # -- coercion ---------------------------------------------------------

    @staticmethod
    def _pair(x, y) -> tuple["QuadVal", "QuadVal", int]:
        if not isinstance(x, QuadVal):
            x = QuadVal(x)
        if not isinstance(y, QuadVal):
            y = QuadVal(y)
        if x.disc == 0:
            return x, y, y.disc
        if y.disc == 0 or y.disc == x.disc:
            return x, y, x.disc
        raise InputError(f"incompatible quadratic fields sqrt({x.disc}) and sqrt({y.disc})")

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        x, y, d = QuadVal._pair(self, other)
        return QuadVal(x.a + y.a, x.b + y.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadVal(-self.a, -self.b, self.disc)

    def __sub__(self, other):
        x, y, d = QuadVal._pair(self, other)
        return QuadVal(x.a - y.a, x.b - y.b, d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        x, y, d = QuadVal._pair(self, other)
        return QuadVal(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadVal":
        norm = self.a * self.a - self.b * self.b * self.disc
        if norm == 0:
            if self.a == 0 and self.b == 0:
                raise ZeroDivisionError("inverse of zero")
            raise ZeroDivisionError("zero field norm")  # impossible for squarefree disc >= 2
        return QuadVal(self.a / norm, -self.b / norm, self.disc)

    def __truediv__(self, other):
        x, y, _ = QuadVal._pair(self, other)
        return x * y.inverse()

    def conjugate(self) -> "QuadVal":
        return QuadVal(self.a, -self.b, self.disc)

    # -- order ------------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of a + b sqrt(disc)."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.a == 0:
            return 1 if self.b > 0 else -1
        sa = 1 if self.a > 0 else -1
        sb = 1 if self.b > 0 else -1
        if sa == sb:
            return sa
        # opposite signs: compare a^2 with b^2 disc
        lhs, rhs = self.a * self.a, self.b * self.b * self.disc
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            x, y, d = QuadVal._pair(self, other)
        except InputError:
            return False
        return x.a == y.a and x.b == y.b

    def __hash__(self):
        return hash((self.a, self.b, self.disc))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def is_rational(self) -> bool:
        return self.b == 0

    def rational_value(self) -> Fraction:
        if self.b != 0:
            raise ValueError("not rational")
        return self.a

    def enclosure(self, bits: int = 64) -> Interval:
        """Dyadic interval containing the real value."""
        if self.b == 0:
            return Interval(self.a)
        root = Interval(sqrt_down(Fraction(self.disc), bits), sqrt_up(Fraction(self.disc), bits))
        return Interval(self.a) + root.scale(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.disc)

    def __repr__(self):
        if self.b == 0:
            return f"QuadVal({self.a})"
        return f"QuadVal({self.a} + {self.b}*sqrt({self.disc}))"


class RP1Point:
    """A point of RP^1: infinity (1:0) or the line through (xi, 1)."""

    __slots__ = ("xi",)

    def __init__(self, xi: Optional[QuadVal]):
        object.__setattr__(self, "xi", xi)

    def __setattr__(self, name, value):
        raise AttributeError("RP1Point is immutable")

    @classmethod
    def infinity(cls) -> "RP1Point":
        return cls(None)

    @classmethod
    def affine(cls, xi) -> "RP1Point":
        return cls(xi if isinstance(xi, QuadVal) else QuadVal(xi))

    @classmethod
    def from_pair(cls, a, b) -> "RP1Point":
        """Point (a : b); b = 0 gives infinity."""
        a = a if isinstance(a, QuadVal) else QuadVal(a)
        b = b if isinstance(b, QuadVal) else QuadVal(b)
        if b.is_zero():
            if a.is_zero():
                raise ValueError("(0 : 0) is not a projective point")
            return cls.infinity()
        return cls(a / b)

    @classmethod
    def from_slope(cls, s) -> "RP1Point":
        """The line of slope s through the origin: the point (1 : s)."""
        return cls.from_pair(QuadVal(1), s)

    @property
    def is_infinity(self) -> bool:
        return self.xi is None

    def vec(self) -> tuple[QuadVal, QuadVal]:
        """Canonical representative vector: (1, 0) or (xi, 1)."""
        if self.xi is None:
            return (QuadVal(1), QuadVal(0))
        return (self.xi, QuadVal(1))

    def apply(self, m: QMatrix) -> "RP1Point":
        if m.dim != 2:
            raise InputError("RP1 action needs a 2x2 matrix")
        u, v = self.vec()
        a = u * m[0, 0] + v * m[0, 1]
        b = u * m[1, 0] + v * m[1, 1]
        return RP1Point.from_pair(a, b)

    def __eq__(self, other):
        if not isinstance(other, RP1Point):
            return NotImplemented
        if self.xi is None or other.xi is None:
            return self.xi is None and other.xi is None
        return self.xi == other.xi

    def __hash__(self):
        return hash(("rp1", None if self.xi is None else (self.xi.a, self.xi.b, self.xi.disc)))

    def __repr__(self):
        if self.xi is None:
            return "RP1Point(inf)"
        return f"RP1Point(xi={self.xi!r})"

    def is_rational(self) -> bool:
        return self.xi is None or self.xi.is_rational()

    def int_pair(self) -> tuple[int, int]:
        """Coprime integer pair (a, b), b >= 0 and a > 0 when b = 0."""
        if self.xi is None:
            return (1, 0)
        xi = self.xi.rational_value()
        return (xi.numerator, xi.denominator)

    def to_json(self):
        a, b = self.int_pair()
        return {"proj": [a, b]}

    @classmethod
    def from_json(cls, obj) -> "RP1Point":
        a, b = obj["proj"]
        if math.gcd(a, b) != 1 or b < 0 or (b == 0 and a <= 0):
            raise InputError(f"projective pair {obj['proj']} is not normalized")
        return cls.from_pair(QuadVal(a), QuadVal(b))


def det_sign(p: RP1Point, q: RP1Point) -> int:
    """Sign of det[vec(p) vec(q)]; positive iff theta(p) < theta(q)."""
    # rational fast path: det of canonical reps reduces to xi_p - xi_q
    if p.xi is None:
        if q.xi is None:
            return 0
        return 1
    if q.xi is None:
        return -1
    if p.xi.b == 0 and q.xi.b == 0:
        d = p.xi.a - q.xi.a
        return (d > 0) - (d < 0)
    return (p.xi - q.xi).sign()


def theta_cmp(p: RP1Point, q: RP1Point) -> int:
    """-1/0/+1 comparison in the theta order on [0, pi)."""
    return -det_sign(p, q)


def strictly_between(a: RP1Point, x: RP1Point, b: RP1Point) -> bool:
    """Is x strictly inside the positive arc from a to b (a != b)?"""
    if x == a or x == b:
        return False
    ab = det_sign(a, b)
    if ab == 0:
        raise ValueError("arc endpoints coincide")
    ax = det_sign(a, x) > 0
    xb = det_sign(x, b) > 0
    if ab > 0:
        return ax and xb
    return ax or xb


def interior_point(p: RP1Point, q: RP1Point) -> RP1Point:
    """An exact point strictly inside the positive arc from p to q.

    With representatives u, v and det[u v] > 0 the mediant u + v lies in
    the subtended sector; otherwise use u - v, i.e. the representative -v.
    """
    u1, u2 = p.vec()
    v1, v2 = q.vec()
    if det_sign(p, q) > 0:
        w1, w2 = u1 + v1, u2 + v2
    else:
        w1, w2 = u1 - v1, u2 - v2
    return RP1Point.from_pair(w1, w2)


def cos_sq_angle(p: RP1Point, q: RP1Point) -> QuadVal:
    """Exact squared cosine of the angle between the two lines."""
    u1, u2 = p.vec()
    v1, v2 = q.vec()
    dot = u1 * v1 + u2 * v2
    nu = u1 * u1 + u2 * u2
    nv = v1 * v1 + v2 * v2
    return (dot * dot) / (nu * nv)


def angle_interval(p: RP1Point, q: RP1Point, bits: int = 48) -> Interval:
    """Certified enclosure of the angle metric d(p, q) = acos sqrt(cos^2)."""
    c2 = cos_sq_angle(p, q)
    if c2.is_rational():
        c = iv_sqrt(Interval(c2.rational_value()), bits + 8)
    else:
        enc = c2.enclosure(bits + 8)
        c = iv_sqrt(Interval(max(enc.lo, Fraction(0)), min(enc.hi, Fraction(1))), bits + 8)
    lo = acos_frac(min(c.hi, Fraction(1)), bits).lo
    hi = acos_frac(max(c.lo, Fraction(0)), bits).hi
    return Interval(lo, hi)


def sorted_by_theta(points: Sequence[RP1Point]) -> list[RP1Point]:
    """Distinct points in increasing theta order (infinity first)."""
    import functools

    distinct = []
    for p in points:
        if all(p != q for q in distinct):
            distinct.append(p)
    return sorted(distinct, key=functools.cmp_to_key(theta_cmp))


def rational_between(p: RP1Point, q: RP1Point, bits: int = 16) -> RP1Point:
    """A rational point strictly inside the positive arc from p to q."""
    if p == q:
        raise ValueError("arc endpoints coincide")
    mid = interior_point(p, q)
    if mid.is_rational():
        return mid
    # dyadic candidates near the interior point, membership verified exactly
    for attempt in range(32):
        ivm = mid.xi.enclosure(bits)
        for cand_frac in (ivm.mid, ivm.lo, ivm.hi):
            cand = RP1Point.affine(cand_frac)
            if cand != p and cand != q and strictly_between(p, cand, q):
                return cand
        bits *= 2
    raise InputError("could not find a rational point in the arc")


@dataclass(frozen=True)
class Arc:
    """The positive arc from start to end with per-endpoint closedness."""

    start: RP1Point
    end: RP1Point
    closed_start: bool = False
    closed_end: bool = False

    def __post_init__(self):
        if self.start == self.end:
            raise ValueError("arc endpoints must be distinct")

    def contains(self, x: RP1Point) -> bool:
        if x == self.start:
            return self.closed_start
        if x == self.end:
            return self.closed_end
        return strictly_between(self.start, x, self.end)

    def contains_strictly(self, x: RP1Point) -> bool:
        """Membership in the open interior."""
        if x == self.start or x == self.end:
            return False
        return strictly_between(self.start, x, self.end)

    def complement(self) -> "Arc":
        return Arc(self.end, self.start, not self.closed_end, not self.closed_start)

    def image(self, m: QMatrix) -> "Arc":
        """Exact image under an invertible projective map.

        Orientation-preserving maps (det > 0) send the positive arc from
        p to q to the positive arc between the images; det < 0 reverses.
        """
        d = m.det
        if d == 0:
            raise SingularMatrixError("projective image needs an invertible matrix")
        s, e = self.start.apply(m), self.end.apply(m)
        if d > 0:
            return Arc(s, e, self.closed_start, self.closed_end)
        return Arc(e, s, self.closed_end, self.closed_start)

    def endpoints(self) -> tuple[RP1Point, RP1Point]:
        return (self.start, self.end)

    def to_json(self):
        return {
            "start": self.start.to_json(),
            "end": self.end.to_json(),
            "positive": True,
            "closed_start": self.closed_start,
            "closed_end": self.closed_end,
        }

    @classmethod
    def from_json(cls, obj) -> "Arc":
        start = RP1Point.from_json(obj["start"])
        end = RP1Point.from_json(obj["end"])
        if not obj.get("positive", True):
            start, end = end, start
        return cls(start, end, bool(obj.get("closed_start", False)), bool(obj.get("closed_end", False)))


def circle_atoms(points: Sequence[RP1Point]) -> list[RP1Point]:
    """Endpoint points plus one interior point per circular gap.

    Any boolean combination of arcs with endpoints among ``points`` is
    constant on each gap, so these atoms witness every nonempty region.
    """
    pts = sorted_by_theta(points)
    if not pts:
        return [RP1Point.infinity(), RP1Point.affine(0)]
    if len(pts) == 1:
        p = pts[0]
        other = RP1Point.infinity() if not p.is_infinity else RP1Point.affine(0)
        return [p, other]
    atoms = list(pts)
    for i, p in enumerate(pts):
        q = pts[(i + 1) % len(pts)]
        atoms.append(interior_point(p, q))
    return atoms


def arcs_intersect(a: Arc, b: Arc) -> Optional[RP1Point]:
    """A common point of the two arcs, or None if they are disjoint.

    Decision: the arcs share an endpoint that belongs to both, or their
    open interiors overlap.  Walking backward from any common interior
    point, the last arc boundary crossed is a start point lying in the
    other interior (or the two starts coincide), which gives the exact
    interior-overlap test.  Witness points for interior overlaps come
    from the atom arrangement (the rare branch).
    """
    for pt in (b.start, b.end, a.start, a.end):
        if a.contains(pt) and b.contains(pt):
            return pt
    interiors_meet = (
        a.contains_strictly(b.start)
        or b.contains_strictly(a.start)
        or a.start == b.start
    )
    if interiors_meet:
        return arcs_intersect_atoms(a, b)
    return None


def arcs_intersect_atoms(a: Arc, b: Arc) -> Optional[RP1Point]:
    """Atom-arrangement reference implementation of arcs_intersect."""
    for atom in circle_atoms([a.start, a.end, b.start, b.end]):
        if a.contains(atom) and b.contains(atom):
            return atom
    return None


def arc_contained(inner: Arc, outer: Arc) -> bool:
    """Exact test inner subseteq outer."""
    for atom in circle_atoms([inner.start, inner.end, outer.start, outer.end]):
        if inner.contains(atom) and not outer.contains(atom):
            return False
    return True
