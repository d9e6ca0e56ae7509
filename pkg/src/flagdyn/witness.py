"""Construction and verification of dynamical pigeonhole witnesses.

A witness for a finite set F of group elements and a tolerance eps is a
family gamma_1..gamma_n with nested sets C_i inside D_i such that

  (1) the translates a C_i and a gamma_i^{-1}(X \\ D_i), over a in F and
      all i, are pairwise disjoint, and
  (2) no point of X lies in eps * sqrt(n) or more of the sets D_i and
      gamma_i^{-1}(X \\ C_i); equivalently their maximum covering
      multiplicity is < eps * sqrt(n).

The construction conjugates powers of a single loxodromic element by
random words: gamma_i = s_i gamma_0^{m_i} s_i^{-1} contracts the
complement of a neighborhood V_i^- of its repelling locus into a small
neighborhood U_i^+ = C_i of its attracting point, with D_i = V_i^+.  On
the projective line every step is exact: arcs with rational endpoints,
images under projective maps, disjointness and multiplicity sweeps.  In
higher rank the sets are metric balls and verification is sampled, never
claimed exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .config import stable_rng
from .certreal import Interval, round_down
from .errors import (
    ExhaustedTriesError,
    InputError,
    MalformedWitnessError,
    MixedKindsError,
    UndecidedMembershipError,
    ZeroSeparationError,
)
from .flags import Flag, act as flag_act, flag_distance
from .qlinalg import QMatrix
from .rp1 import (
    Arc,
    RP1Point,
    angle_interval,
    arc_contained,
    arcs_intersect,
    circle_atoms,
    cos_sq_angle,
    interior_point,
    sorted_by_theta,
    strictly_between,
    theta_cmp,
)
from .words import GroupPresentation, word_inverse, word_mul

Point = Union[RP1Point, Flag]


@dataclass(frozen=True)
class Ball:
    """Metric ball on the flag space (d >= 3 set components)."""

    center: Flag
    radius: Fraction

    def __post_init__(self):
        if self.radius <= 0:
            raise InputError("ball radius must be positive")

    def contains(self, x: Flag) -> bool:
        dist = flag_distance(self.center, x)
        if dist.hi <= self.radius:
            return True
        if dist.lo > self.radius:
            return False
        raise UndecidedMembershipError("point sits on the ball boundary at this precision")

    def to_json(self):
        from .qlinalg import rat_str

        return {"center": self.center.to_json(), "radius": rat_str(self.radius)}

    @classmethod
    def from_json(cls, obj):
        from .qlinalg import parse_rat

        return cls(Flag.from_json(obj["center"]), parse_rat(obj["radius"]))


class SetDescriptor:
    """A finite union of arcs (d = 2) or metric balls (d >= 3).

    Arc components are kept pairwise disjoint and sorted by start point,
    so equal sets have equal descriptors.  kind is "arc-union",
    "ball-union" or "full" (the whole space).
    """

    __slots__ = ("kind", "arcs", "balls")

    def __init__(self, kind: str, arcs: tuple[Arc, ...] = (), balls: tuple[Ball, ...] = ()):
        if kind not in ("arc-union", "ball-union", "full"):
            raise InputError(f"unknown descriptor kind {kind!r}")
        if kind == "arc-union":
            arcs = _canonical_arcs(arcs)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "balls", balls)

    def __setattr__(self, name, value):
        raise AttributeError("SetDescriptor is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def arc_union(cls, arcs: Sequence[Arc]) -> "SetDescriptor":
        return cls("arc-union", tuple(arcs))

    @classmethod
    def single_arc(cls, arc: Arc) -> "SetDescriptor":
        return cls("arc-union", (arc,))

    @classmethod
    def ball_union(cls, balls: Sequence[Ball]) -> "SetDescriptor":
        return cls("ball-union", balls=tuple(balls))

    @classmethod
    def empty(cls) -> "SetDescriptor":
        return cls("arc-union", ())

    @classmethod
    def full_space(cls) -> "SetDescriptor":
        return cls("full")

    def __eq__(self, other):
        return (
            isinstance(other, SetDescriptor)
            and self.kind == other.kind
            and self.arcs == other.arcs
            and self.balls == other.balls
        )

    def __repr__(self):
        if self.kind == "full":
            return "SetDescriptor(full)"
        if self.kind == "arc-union":
            return f"SetDescriptor({len(self.arcs)} arcs)"
        return f"SetDescriptor({len(self.balls)} balls)"

    @property
    def is_empty(self) -> bool:
        return self.kind == "arc-union" and not self.arcs

    # -- pointwise ----------------------------------------------------------

    def contains_point(self, x: Point) -> bool:
        if self.kind == "full":
            return True
        if self.kind == "arc-union":
            return any(a.contains(x) for a in self.arcs)
        return any(b.contains(x) for b in self.balls)

    def contains_interior_point(self, x: Point) -> bool:
        if self.kind == "full":
            return True
        if self.kind == "arc-union":
            return any(a.contains_strictly(x) for a in self.arcs)
        return any(b.contains(x) for b in self.balls)  # balls are open by convention

    # -- arc-union algebra (exact) -------------------------------------------

    def _require_arcs(self, op: str):
        if self.kind != "arc-union":
            raise MixedKindsError(f"{op} is exact for arc unions only")

    def complement(self) -> "SetDescriptor":
        if self.kind == "full":
            return SetDescriptor.empty()
        self._require_arcs("complement")
        if not self.arcs:
            return SetDescriptor.full_space()
        arcs = list(self.arcs)
        out = []
        for i, cur in enumerate(arcs):
            nxt = arcs[(i + 1) % len(arcs)]
            if cur.end == nxt.start:
                if not cur.closed_end and not nxt.closed_start:
                    raise MalformedWitnessError("complement of touching open components is not an arc union")
                continue  # no gap at a shared endpoint
            out.append(Arc(cur.end, nxt.start, not cur.closed_end, not nxt.closed_start))
        if not out and len(arcs) == 1:
            # single arc covering all but its endpoints cannot happen: the
            # complement of one arc is always one arc
            raise MalformedWitnessError("degenerate arc union")
        return SetDescriptor.arc_union(out)

    def image(self, m: QMatrix) -> "SetDescriptor":
        if self.kind == "full":
            return self
        self._require_arcs("image")
        return SetDescriptor.arc_union([a.image(m) for a in self.arcs])

    def intersects(self, other: "SetDescriptor") -> Optional[Point]:
        """A common point, or None (exact for arc unions)."""
        if self.kind == "full":
            return _any_point(other)
        if other.kind == "full":
            return _any_point(self)
        self._require_arcs("intersection")
        other._require_arcs("intersection")
        for a in self.arcs:
            for b in other.arcs:
                pt = arcs_intersect(a, b)
                if pt is not None:
                    return pt
        return None

    def contains_descriptor(self, other: "SetDescriptor") -> bool:
        """Exact containment other subseteq self for arc unions."""
        if self.kind == "full":
            return True
        if other.kind == "full":
            return False
        self._require_arcs("containment")
        other._require_arcs("containment")
        pts = [p for a in self.arcs for p in a.endpoints()]
        pts += [p for a in other.arcs for p in a.endpoints()]
        for atom in circle_atoms(pts):
            if other.contains_point(atom) and not self.contains_point(atom):
                return False
        return True

    # -- serialization ----------------------------------------------------------

    def to_json(self):
        if self.kind == "full":
            return {"kind": "full"}
        if self.kind == "arc-union":
            return {"kind": "arc-union", "arcs": [a.to_json() for a in self.arcs]}
        return {"kind": "ball-union", "balls": [b.to_json() for b in self.balls]}

    @classmethod
    def from_json(cls, obj) -> "SetDescriptor":
        kind = obj.get("kind")
        if kind == "full":
            return cls.full_space()
        if kind == "arc-union":
            return cls.arc_union([Arc.from_json(a) for a in obj["arcs"]])
        if kind == "ball-union":
            return cls.ball_union([Ball.from_json(b) for b in obj["balls"]])
        raise MalformedWitnessError(f"unknown descriptor kind {kind!r}")


def _canonical_arcs(arcs: Sequence[Arc]) -> tuple[Arc, ...]:
    """Sort by start point and insist on pairwise disjointness."""
    import functools

    arcs = tuple(arcs)
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            pt = arcs_intersect(arcs[i], arcs[j])
            if pt is not None:
                raise InputError(f"descriptor arcs overlap at {pt!r}")
    return tuple(sorted(arcs, key=functools.cmp_to_key(lambda a, b: theta_cmp(a.start, b.start))))


def _any_point(desc: SetDescriptor) -> Point:
    if desc.kind == "full":
        return RP1Point.infinity()
    if desc.kind == "arc-union":
        if not desc.arcs:
            raise InputError("empty descriptor has no points")
        a = desc.arcs[0]
        return interior_point(a.start, a.end)
    return desc.balls[0].center


def descriptor_membership(desc: SetDescriptor, x: Point) -> bool:
    return desc.contains_point(x)


# -- covering multiplicity ------------------------------------------------------


@dataclass(frozen=True)
class MultiplicityResult:
    m: int
    witness: Optional[Point]
    certification: str  # "exact" | "sampled"


def max_multiplicity(sets: Sequence[SetDescriptor], *, seed: int = 0, samples: int = 2000) -> MultiplicityResult:
    """Maximum number of descriptors covering a single point.

    Arc unions: exact event sweep over the circular arrangement of all
    endpoints; gap coverage by difference counters, endpoint coverage by
    direct membership.  Ball unions: sampled maximum, labeled as such.
    """
    if not sets:
        return MultiplicityResult(0, None, "exact")
    kinds = {s.kind for s in sets}
    if "ball-union" in kinds and kinds != {"ball-union"}:
        raise MixedKindsError("cannot mix ball descriptors with other kinds")
    full_count = sum(1 for s in sets if s.kind == "full")
    if kinds <= {"arc-union", "full"}:
        arc_sets = [s for s in sets if s.kind == "arc-union"]
        m, wit = _sweep_multiplicity(arc_sets)
        if full_count and wit is None:
            wit = RP1Point.infinity()
        return MultiplicityResult(m + full_count, wit, "exact")
    return _sampled_multiplicity(sets, seed, samples)


def _sweep_multiplicity(arc_sets: Sequence[SetDescriptor]) -> tuple[int, Optional[Point]]:
    tagged = [(a, idx) for idx, s in enumerate(arc_sets) for a in s.arcs]
    if not tagged:
        return 0, None
    points = sorted_by_theta([p for a, _ in tagged for p in a.endpoints()])
    k = len(points)
    index_of = {p: i for i, p in enumerate(points)}
    # gap g_i runs from points[i] to points[i+1 mod k]; an arc covers the
    # gaps from its start index up to (not including) its end index
    deltas = [0] * k
    for a, _idx in tagged:
        si, ei = index_of[a.start], index_of[a.end]
        if si < ei:
            deltas[si] += 1
            deltas[ei] -= 1
        else:  # wraps past the top of the theta order
            deltas[si] += 1
            deltas[0] += 1
            deltas[ei] -= 1
    best_m, best_at = 0, None
    cover = 0
    for i in range(k):
        cover += deltas[i]
        if cover > best_m:
            best_m, best_at = cover, i
    witness: Optional[Point] = None
    if best_at is not None:
        p, q = points[best_at], points[(best_at + 1) % k]
        witness = interior_point(p, q) if p != q else p
    # endpoints can beat gaps when closed arcs touch
    for p in points:
        cnt = sum(1 for s in arc_sets if s.contains_point(p))
        if cnt > best_m:
            best_m, witness = cnt, p
    return best_m, witness


def _sampled_multiplicity(sets, seed, samples) -> MultiplicityResult:
    from .position import _random_flag

    rng = stable_rng("multiplicity", seed)
    dim = next(b.center.dim for s in sets if s.kind == "ball-union" for b in s.balls)
    best_m, witness = 0, None
    centers = [b.center for s in sets if s.kind == "ball-union" for b in s.balls]
    candidates = list(centers)
    while len(candidates) < samples + len(centers):
        candidates.append(_random_flag(rng, dim, 10))
    for z in candidates:
        cnt = 0
        for s in sets:
            try:
                if s.contains_point(z):
                    cnt += 1
            except UndecidedMembershipError:
                cnt += 1  # boundary counts against us: stay conservative
        if cnt > best_m:
            best_m, witness = cnt, z
    return MultiplicityResult(best_m, witness, "sampled")


# -- instance / witness types -------------------------------------------------------


@dataclass(frozen=True)
class PhpInstance:
    group: GroupPresentation
    f_words: tuple[str, ...]
    epsilon: Fraction

    def __post_init__(self):
        if not self.f_words:
            raise InputError("F must be nonempty")
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive")


@dataclass(frozen=True)
class PhpWitness:
    group: GroupPresentation
    f_words: tuple[str, ...]
    epsilon: Fraction
    n: int
    gammas: tuple[tuple[str, QMatrix], ...]
    c_sets: tuple[SetDescriptor, ...]
    d_sets: tuple[SetDescriptor, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.n == len(self.gammas) == len(self.c_sets) == len(self.d_sets)):
            raise MalformedWitnessError("witness arrays must all have length n")
        if self.n < 1:
            raise MalformedWitnessError("witness needs n >= 1")
        for c, d in zip(self.c_sets, self.d_sets):
            if c.kind == "arc-union" and d.kind in ("arc-union", "full"):
                if not d.contains_descriptor(c):
                    raise MalformedWitnessError("witness violates C_i inside D_i")
        k = self.provenance.get("K")
        if isinstance(k, int) and k > 0:
            if not Fraction(self.epsilon) ** 2 * self.n > 4 * k * k:
                raise MalformedWitnessError("recorded K does not satisfy eps sqrt(n) > 2K")


def choose_n(epsilon: Fraction, k: int) -> int:
    """Least n with epsilon^2 * n > 4 K^2 (strict), computed exactly."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0 or k < 1:
        raise InputError("epsilon and K must be positive")
    threshold = Fraction(4 * k * k) / (epsilon * epsilon)
    n = int(threshold) + 1
    return n


def multiplicity_bound_ok(m: int, epsilon: Fraction, n: int) -> bool:
    """Exact test m < epsilon * sqrt(n) via squaring."""
    if m < 0:
        raise InputError("multiplicity must be >= 0")
    return Fraction(m * m) < Fraction(epsilon) ** 2 * n


# -- generic tuple search ------------------------------------------------------------


def _random_reduced_word(rng: random.Random, letters: Sequence[str], max_len: int) -> str:
    if not letters:
        return ""
    length = rng.randint(1, max_len)
    out: list[str] = []
    while len(out) < length:
        ch = letters[rng.randrange(len(letters))]
        if out and out[-1] == ch.swapcase() and out[-1] != ch:
            continue
        out.append(ch)
    return "".join(out)


def _act_point(m: QMatrix, x: Point) -> Point:
    if isinstance(x, RP1Point):
        return x.apply(m)
    return flag_act(m, x)


def search_generic_tuple(
    group: GroupPresentation,
    f_words: Sequence[str],
    x_plus: Point,
    x_minus: Point,
    n: int,
    seed: int = 0,
    max_tries: int = 200,
    word_len: int = 5,
) -> list[str]:
    """Random conjugating words s_1..s_n with exactly distinct translates.

    Conditions checked exactly on every candidate tuple: all points
    a s_i x^{+-} for a in F union {e} are pairwise distinct, and for the
    projective line the two point families are automatically in general
    position once distinct.  Raises with the dominant failure mode after
    max_tries attempts.
    """
    if n == 0:
        return []
    if n < 0:
        raise InputError("n must be >= 0")
    letters = group.letters()
    f_mats = [(w, group.word_matrix(w)) for w in ["", *f_words]]
    fail_distinct = 0
    for attempt in range(max_tries):
        rng = stable_rng("tuple", seed, attempt)
        s_words = [_random_reduced_word(rng, letters, word_len) for _ in range(n)]
        s_mats = [group.word_matrix(w) for w in s_words]
        points = []
        for smat in s_mats:
            for base in (x_plus, x_minus):
                moved = _act_point(smat, base)
                points.extend(_act_point(amat, moved) for _, amat in f_mats)
        if _pairwise_distinct(points):
            if _tuple_general_position(s_mats, x_plus, x_minus, group.dim, seed):
                return s_words
        fail_distinct += 1
    raise ExhaustedTriesError(
        f"no valid tuple in {max_tries} tries (distinctness failed {fail_distinct} times); "
        "the group may act with too few distinct translates"
    )


def _pairwise_distinct(points: Sequence[Point]) -> bool:
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if points[i] == points[j]:
                return False
    return True


def _tuple_general_position(s_mats, x_plus, x_minus, dim, seed) -> bool:
    if isinstance(x_plus, RP1Point):
        # on the projective line general position = pairwise distinctness,
        # which the caller has already established for the larger family
        return True
    from .position import Configuration, general_position_check

    for base in (x_plus, x_minus):
        pts = tuple(flag_act(m, base) for m in s_mats)
        try:
            config = Configuration(points=pts, dim=dim)
        except InputError:
            return False
        if not general_position_check(config, mode="monte-carlo", seed=seed).holds:
            return False
    return True


# -- neighborhood construction --------------------------------------------------------


@dataclass(frozen=True)
class NeighborhoodFamily:
    points: tuple[Point, ...]
    inner: tuple[SetDescriptor, ...]  # U_i
    outer: tuple[SetDescriptor, ...]  # V_i, U_i subseteq V_i
    radius_bound: Fraction


def build_neighborhoods(
    points: Sequence[Point],
    f_mats: Sequence[QMatrix],
    safety: Fraction = Fraction(1, 2),
    *,
    max_shrink: int = 12,
    bits: int = 48,
) -> NeighborhoodFamily:
    """Nested neighborhoods U_i inside V_i around each point.

    The radius bound is safety * (minimum pairwise distance among all
    F-translates of the points) / 3.  On the projective line the arcs get
    rational endpoints chosen inside that angular radius, and the family
    is rebuilt with halved radius until the exact disjointness checks
    pass: all F-translates of all U's pairwise disjoint, and the V's
    pairwise disjoint.
    """
    if not 0 < safety < 1:
        raise InputError("safety factor must be in (0, 1)")
    if not points:
        raise InputError("need at least one point")
    translates: list[Point] = []
    for x in points:
        for amat in f_mats:
            translates.append(_act_point(amat, x))
    if not _pairwise_distinct(translates):
        raise ZeroSeparationError("duplicate F-translates: zero separation")
    if isinstance(points[0], RP1Point):
        return _build_arc_neighborhoods(points, f_mats, translates, safety, max_shrink, bits)
    return _build_ball_neighborhoods(points, f_mats, translates, safety, max_shrink)


def _min_pairwise_angle(translates: Sequence[RP1Point], bits: int) -> Interval:
    """Certified enclosure of the minimum pairwise angle.

    The closest pair maximizes the exact squared cosine, so pair selection
    is exact and only one acos enclosure is needed.
    """
    if len(translates) < 2:
        raise InputError("separation needs at least two translate points")
    best = None
    for i in range(len(translates)):
        for j in range(i + 1, len(translates)):
            c2 = cos_sq_angle(translates[i], translates[j])
            if best is None or (c2 - best[0]).sign() > 0:
                best = (c2, i, j)
    _, bi, bj = best
    return angle_interval(translates[bi], translates[bj], bits)


def _arc_endpoint_near(
    center: RP1Point,
    boundary: RP1Point,
    max_angle: Fraction,
    side: str,
    bits: int = 48,
) -> RP1Point:
    """A rational point strictly between boundary and center (by theta),
    within max_angle of center; side "before" places it at smaller theta.

    Candidate offsets start at the chart scale of the target angle
    (d theta / d xi = -1/(1 + xi^2)) and halve until the exact membership
    and certified angle checks both pass.  Smaller theta means larger
    chart coordinate; around infinity (theta = 0) the wrap goes through
    large negative coordinates.
    """
    if center.is_infinity:
        # angle to the point at coordinate xi is atan(1/|xi|) <= 1/|xi|
        base_mag = Fraction(4) / max_angle
        for attempt in range(60):
            mag = base_mag * 2**attempt
            cand = RP1Point.affine(-mag) if side == "before" else RP1Point.affine(mag)
            if cand == boundary:
                continue
            if side == "before":
                inside = strictly_between(boundary, cand, center)
            else:
                inside = strictly_between(center, cand, boundary)
            if inside and angle_interval(cand, center, bits).hi <= max_angle:
                return cand
        raise ExhaustedTriesError("could not place a rational arc endpoint near infinity")
    enc = center.xi.enclosure(bits)
    xi_sq_hi = max(enc.lo * enc.lo, enc.hi * enc.hi)
    scale = max_angle * (1 + xi_sq_hi) / 4
    for attempt in range(60):
        off = scale / 2**attempt
        cand = RP1Point.affine(enc.hi + off) if side == "before" else RP1Point.affine(enc.lo - off)
        if cand == center or cand == boundary:
            continue
        if side == "before":
            inside = strictly_between(boundary, cand, center)
        else:
            inside = strictly_between(center, cand, boundary)
        if inside and angle_interval(cand, center, bits).hi <= max_angle:
            return cand
    raise ExhaustedTriesError("could not place a rational arc endpoint near the center")


def _build_arc_neighborhoods(points, f_mats, translates, safety, max_shrink, bits):
    delta = _min_pairwise_angle(translates, bits)
    radius = safety * delta.lo / 3
    if radius <= 0:
        raise ZeroSeparationError("separation enclosure is not positive; raise the precision")
    ordered = sorted_by_theta(translates)
    k = len(ordered)
    neighbors = {}
    for i, p in enumerate(ordered):
        neighbors[p] = (ordered[(i - 1) % k], ordered[(i + 1) % k])
    for shrink in range(max_shrink):
        inner, outer = [], []
        for x in points:
            prev_pt, next_pt = neighbors[x]
            # theta decreases toward "before": boundary toward prev
            v_before = _arc_endpoint_near(x, prev_pt, radius, "before")
            v_after = _arc_endpoint_near(x, next_pt, radius, "after")
            u_before = _arc_endpoint_near(x, v_before, radius / 2, "before")
            u_after = _arc_endpoint_near(x, v_after, radius / 2, "after")
            v_arc = Arc(v_before, v_after)
            u_arc = Arc(u_before, u_after)
            if not arc_contained(u_arc, v_arc):
                raise ExhaustedTriesError("inner arc escaped the outer arc")
            inner.append(SetDescriptor.single_arc(u_arc))
            outer.append(SetDescriptor.single_arc(v_arc))
        if _families_disjoint(points, f_mats, inner, outer):
            return NeighborhoodFamily(tuple(points), tuple(inner), tuple(outer), radius)
        radius /= 2
    raise ExhaustedTriesError("neighborhoods stayed entangled after repeated shrinking")


def _families_disjoint(points, f_mats, inner, outer) -> bool:
    """Exact disjointness: all F-translates of U's pairwise, V's pairwise."""
    translated_inner = [u.image(amat) for u in inner for amat in f_mats]
    for i in range(len(translated_inner)):
        for j in range(i + 1, len(translated_inner)):
            if translated_inner[i].intersects(translated_inner[j]) is not None:
                return False
    for i in range(len(outer)):
        for j in range(i + 1, len(outer)):
            if outer[i].intersects(outer[j]) is not None:
                return False
    return True


def _build_ball_neighborhoods(points, f_mats, translates, safety, max_shrink):
    best = None
    for i in range(len(translates)):
        for j in range(i + 1, len(translates)):
            d = flag_distance(translates[i], translates[j])
            if best is None or d.lo < best:
                best = d.lo
    if best <= 0:
        raise ZeroSeparationError("flag separation enclosure is not positive")
    radius = round_down(safety * best / 3, 40)
    inner = tuple(SetDescriptor.ball_union([Ball(x, radius / 2)]) for x in points)
    outer = tuple(SetDescriptor.ball_union([Ball(x, radius)]) for x in points)
    return NeighborhoodFamily(tuple(points), inner, outer, radius)


# -- verification -----------------------------------------------------------------


@dataclass(frozen=True)
class Condition1Report:
    passed: bool
    overlap: Optional[tuple] = None  # ((label_i, a_i), (label_j, a_j), point)

    def to_json(self):
        if self.passed:
            return {"pass": True}
        (li, ai), (lj, aj), pt = self.overlap
        return {
            "pass": False,
            "overlap": {
                "first": {"set": list(li), "translator": ai},
                "second": {"set": list(lj), "translator": aj},
                "point": _point_json(pt),
            },
        }


@dataclass(frozen=True)
class Condition2Report:
    passed: bool
    multiplicity: int
    epsilon: Fraction
    n: int
    witness_point: Optional[Point] = None

    def bound_squared(self) -> Fraction:
        return Fraction(self.epsilon) ** 2 * self.n

    def to_json(self):
        from .qlinalg import rat_str

        out = {
            "pass": self.passed,
            "max_multiplicity": self.multiplicity,
            "epsilon": rat_str(Fraction(self.epsilon)),
            "n": self.n,
            "bound_sqrt_of": rat_str(self.bound_squared()),
            "bound_approx": float(self.bound_squared()) ** 0.5,
        }
        if self.witness_point is not None:
            out["witness_point"] = _point_json(self.witness_point)
        return out


@dataclass(frozen=True)
class VerificationReport:
    condition1: Condition1Report
    condition2: Condition2Report
    certification: str  # "exact" | "sampled"
    params: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.condition1.passed and self.condition2.passed

    def to_json(self):
        out = {
            "condition1": self.condition1.to_json(),
            "condition2": self.condition2.to_json(),
            "certification": self.certification,
            "pass": self.passed,
        }
        if self.params:
            out["params"] = self.params
        return out


def _point_json(pt: Point):
    if isinstance(pt, RP1Point):
        if pt.is_rational():
            return pt.to_json()
        enc = pt.xi.enclosure(48)
        from .qlinalg import rat_str

        return {"chart_enclosure": [rat_str(enc.lo), rat_str(enc.hi)]}
    return pt.to_json()


def verify_witness(
    witness: PhpWitness,
    f_words: Optional[Sequence[str]] = None,
    epsilon: Optional[Fraction] = None,
    *,
    seed: int = 0,
    samples: int = 2000,
) -> VerificationReport:
    """Check both witness conditions from the stored data alone.

    Exact on the projective line: every set in sight is an arc union with
    rational endpoints and every disjointness or multiplicity decision is
    a determinant sign computation.  Ball descriptors get the sampled
    verifier, and the report says so.
    """
    group = witness.group
    f_words = tuple(witness.f_words if f_words is None else f_words)
    epsilon = Fraction(witness.epsilon if epsilon is None else epsilon)
    if not f_words:
        raise InputError("F must be nonempty")
    n = witness.n
    exact = all(s.kind in ("arc-union", "full") for s in witness.c_sets + witness.d_sets)
    f_mats = [(w, group.word_matrix(w)) for w in f_words]
    gam_inv = [m.inverse() for _w, m in witness.gammas]

    if exact:
        cond1_sets = []
        for a_word, a_mat in f_mats:
            for i in range(n):
                cond1_sets.append((("C", i), a_word, witness.c_sets[i].image(a_mat)))
        for a_word, a_mat in f_mats:
            for i in range(n):
                pulled = witness.d_sets[i].complement().image(gam_inv[i])
                cond1_sets.append((("Dc", i), a_word, pulled.image(a_mat)))
        overlap = None
        for i in range(len(cond1_sets)):
            for j in range(i + 1, len(cond1_sets)):
                li, ai, si = cond1_sets[i]
                lj, aj, sj = cond1_sets[j]
                pt = si.intersects(sj)
                if pt is not None:
                    overlap = ((li, ai), (lj, aj), pt)
                    break
            if overlap:
                break
        cond1 = Condition1Report(overlap is None, overlap)

        cond2_sets = list(witness.d_sets) + [
            witness.c_sets[i].complement().image(gam_inv[i]) for i in range(n)
        ]
        mres = max_multiplicity(cond2_sets)
        cond2 = Condition2Report(
            multiplicity_bound_ok(mres.m, epsilon, n), mres.m, epsilon, n, mres.witness
        )
        return VerificationReport(cond1, cond2, "exact")

    return _verify_sampled(witness, f_mats, gam_inv, epsilon, seed, samples)


def _verify_sampled(witness, f_mats, gam_inv, epsilon, seed, samples):
    """Falsifier-plus-margin sampling for ball descriptors (d >= 3)."""
    from .position import _random_flag

    n = witness.n
    dim = witness.group.dim
    rng = stable_rng("verify", seed)

    def cond1_member(label, i, a_mat_inv, z):
        # z in a C_i  <=>  a^{-1} z in C_i ; z in a gamma_i^{-1}(X \ D_i)
        # <=> gamma_i a^{-1} z in X \ D_i
        back = flag_act(a_mat_inv, z)
        if label == "C":
            return witness.c_sets[i].contains_point(back)
        moved = flag_act(witness.gammas[i][1], back)
        return not witness.d_sets[i].contains_point(moved)

    cond1_index = [
        (label, i, a_word, a_mat.inverse())
        for label in ("C", "Dc")
        for i in range(n)
        for a_word, a_mat in f_mats
    ]
    centers = [b.center for s in witness.c_sets + witness.d_sets if s.kind == "ball-union" for b in s.balls]
    sample_pts = centers + [_random_flag(rng, dim, 10) for _ in range(samples)]
    overlap = None
    for z in sample_pts:
        hits = []
        for label, i, a_word, a_inv in cond1_index:
            try:
                if cond1_member(label, i, a_inv, z):
                    hits.append(((label, i), a_word))
            except UndecidedMembershipError:
                hits.append(((label, i), a_word))
        if len(hits) >= 2:
            overlap = (hits[0], hits[1], z)
            break
    cond1 = Condition1Report(overlap is None, overlap)

    def cond2_count(z):
        cnt = 0
        for i in range(n):
            try:
                if witness.d_sets[i].contains_point(z):
                    cnt += 1
            except UndecidedMembershipError:
                cnt += 1
            moved = flag_act(witness.gammas[i][1], z)
            try:
                if not witness.c_sets[i].contains_point(moved):
                    cnt += 1
            except UndecidedMembershipError:
                cnt += 1
        return cnt

    best_m, wit_pt = 0, None
    for z in sample_pts:
        c = cond2_count(z)
        if c > best_m:
            best_m, wit_pt = c, z
    cond2 = Condition2Report(multiplicity_bound_ok(best_m, epsilon, n), best_m, epsilon, n, wit_pt)
    return VerificationReport(cond1, cond2, "sampled", {"samples": len(sample_pts), "seed": seed})


# -- hat transport -----------------------------------------------------------------


def pullback_hat(
    a_set: SetDescriptor,
    basepoint: Point,
    words: Sequence[tuple[str, QMatrix]],
) -> list[str]:
    """Words gamma with gamma.basepoint inside the given set.

    Transports subsets of the flag space to subsets of the group along an
    orbit map; disjointness and covering multiplicity can only improve
    under this pullback.
    """
    out = []
    for word, mat in words:
        if a_set.contains_point(_act_point(mat, basepoint)):
            out.append(word)
    return out


# -- end-to-end construction --------------------------------------------------------


def construct_witness(
    instance: PhpInstance,
    seed: int = 0,
    config: Optional["RunConfig"] = None,
) -> PhpWitness:
    """Build a verified witness for the instance.

    Pipeline: find a loxodromic gamma_0 with fixed pair (x+, x-); take the
    intersection constant K for the dimension; n is the least integer with
    eps^2 n > 4 K^2; draw conjugating words s_i with exactly distinct
    translates; build nested neighborhoods around the translated fixed
    points; raise gamma_0 to the least power m_i that contracts both ways;
    return the witness with C_i the inner attracting arcs and D_i the
    outer ones.
    """
    from .config import RunConfig
    from .dynamics import certify_contraction, find_loxodromic
    from .position import conservative_group_constant

    cfg = config or RunConfig()
    group = instance.group
    f_words = instance.f_words
    eps = instance.epsilon

    gamma0_word, prox = find_loxodromic(group, cfg.gamma0_radius, cfg.cache_dir)
    gamma0 = prox.g
    k = conservative_group_constant(group.dim)
    n = choose_n(eps, k)
    s_words = search_generic_tuple(
        group,
        f_words,
        prox.attracting,
        prox.repelling,
        n,
        seed=seed,
        max_tries=cfg.tuple_retries,
        word_len=cfg.tuple_word_len,
    )
    s_mats = [group.word_matrix(w) for w in s_words]
    points: list[Point] = []
    for smat in s_mats:
        points.append(_act_point(smat, prox.attracting))   # x_i^+
        points.append(_act_point(smat, prox.repelling))    # x_i^-
    f_mats = [group.word_matrix(w) for w in ["", *f_words]]
    family = build_neighborhoods(points, f_mats, cfg.safety)

    gammas = []
    c_sets, d_sets = [], []
    m_powers = []
    for i in range(n):
        u_plus, v_plus = family.inner[2 * i], family.outer[2 * i]
        u_minus, v_minus = family.inner[2 * i + 1], family.outer[2 * i + 1]
        h = s_mats[i] * gamma0 * s_mats[i].inverse()
        m_i = _joint_contraction_power(h, v_minus, u_plus, v_plus, u_minus, cfg)
        m_powers.append(m_i)
        gamma_word = word_mul(s_words[i], gamma0_word * m_i, word_inverse(s_words[i]))
        gammas.append((gamma_word, h.pow(m_i)))
        c_sets.append(u_plus)
        d_sets.append(v_plus)

    provenance = {
        "gamma0": gamma0_word,
        "conjugators": list(s_words),
        "powers": m_powers,
        "K": k,
        "seed": seed,
        "safety": str(cfg.safety),
        "radius_bound": str(family.radius_bound),
    }
    witness = PhpWitness(
        group=group,
        f_words=tuple(f_words),
        epsilon=eps,
        n=n,
        gammas=tuple(gammas),
        c_sets=tuple(c_sets),
        d_sets=tuple(d_sets),
        provenance=provenance,
    )
    report = verify_witness(witness, seed=seed, samples=cfg.verify_samples)
    if not report.passed:
        raise ExhaustedTriesError(
            "constructed witness failed its own verification; "
            f"condition1={report.condition1.passed} condition2={report.condition2.passed}"
        )
    return witness


def _joint_contraction_power(h, v_minus, u_plus, v_plus, u_minus, cfg) -> int:
    """Least m with h^m(X \ V-) in U+ and h^-m(X \ V+) in U-."""
    from .dynamics import contraction_holds

    n_max = cfg.n_max_power
    if v_minus.kind == "arc-union":
        h_inv = h.inverse()
        fwd, bwd = h, h_inv
        for m in range(1, n_max + 1):
            if contraction_holds(fwd, v_minus, u_plus) and contraction_holds(bwd, v_plus, u_minus):
                return m
            fwd = fwd * h
            bwd = bwd * h_inv
        from .errors import ExceededNMaxError

        raise ExceededNMaxError(f"no power <= {n_max} contracts both ways")
    # ball descriptors: sampled certification per direction
    from .dynamics import certify_contraction

    cert_f = certify_contraction(
        h, v_minus, u_plus, n_max,
        seed=cfg.seed, grid_samples=cfg.grid_samples, adversarial_samples=cfg.adversarial_samples,
    )
    cert_b = certify_contraction(
        h.inverse(), v_plus, u_minus, n_max,
        seed=cfg.seed, grid_samples=cfg.grid_samples, adversarial_samples=cfg.adversarial_samples,
    )
    return max(cert_f.n, cert_b.n)
