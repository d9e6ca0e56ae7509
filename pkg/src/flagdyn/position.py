"""General-position testing and uniform chain-length bounds.

A flag configuration is in general position when no intersection of the
non-transversality sets Y_x of a finite subfamily is trapped inside the
Y-set of another member unless it is already empty.  On the projective
line Y_x = {x}, so the condition reduces to pairwise distinctness and is
decided exactly.  In higher rank the checker hunts for separating witness
flags; it reports probabilistic verdicts and never claims a certificate
it does not have.

The chain bound: any strictly descending chain of subvarieties of P^m cut
out by forms of degree <= D has length at most the dimension of the space
of forms of degree <= D, because the spans of the defining sets form a
strictly ascending chain of subspaces.  That dimension is
sum_{r=0}^{D} C(m + r, m).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .config import stable_rng
from .errors import DuplicatePointsError, EmptyListError, InputError
from .flags import Flag, canonicalize, transversal
from .qlinalg import QMatrix


@dataclass(frozen=True)
class NoetherianParams:
    proj_dim: int
    max_deg: int

    def __post_init__(self):
        if self.proj_dim < 1:
            raise InputError("projective dimension must be >= 1")
        if self.max_deg < 0:
            raise InputError("degree bound must be >= 0")


def noetherian_bound(params: NoetherianParams) -> int:
    """1 + dim of the space of forms of degree <= D in proj_dim + 1 variables."""
    m, deg = params.proj_dim, params.max_deg
    return 1 + sum(math.comb(m + r, m) for r in range(deg + 1))


def group_bound(per_place_k: Sequence[int]) -> int:
    """Combine per-place chain bounds: |S| times the largest of them."""
    if not per_place_k:
        raise EmptyListError("need at least one place")
    if any(k < 1 for k in per_place_k):
        raise InputError("chain bounds must be positive")
    return len(per_place_k) * max(per_place_k)


def conservative_group_constant(d: int) -> int:
    """Default intersection constant used by the witness pipeline.

    d = 2: on the projective line the Y-sets are singletons, so distinct
    points have pairwise empty intersections and K = 1 is exact.  For
    d >= 3 the full flag variety sits in the product of the Grassmannian
    Pluecker spaces; we take that ambient projective dimension with a
    conservative degree bound D = d for the incidence determinants.
    Any valid upper bound only enlarges the witness, never breaks it.
    """
    if d < 2:
        raise InputError("flag dynamics needs dimension >= 2")
    if d == 2:
        return 1
    ambient = 1
    for i in range(1, d):
        ambient *= math.comb(d, i)
    return noetherian_bound(NoetherianParams(ambient - 1, d))


@dataclass(frozen=True)
class Configuration:
    points: tuple[Flag, ...]
    dim: int

    def __post_init__(self):
        seen = set()
        for p in self.points:
            if p.dim != self.dim:
                raise InputError("configuration points must share a dimension")
            if p in seen:
                raise DuplicatePointsError("configuration contains duplicate flags")
            seen.add(p)


@dataclass(frozen=True)
class PositionVerdict:
    """Outcome of a general-position check.

    kind is one of "certified-true", "certified-false", "probable-true"
    or "counterexample".  Sampling alone never certifies a failure: a
    condition whose common locus was hit but never escaped Y_{x'} is
    recorded in suspicious_conditions while the kind stays probabilistic.
    """

    kind: str
    dim: int
    mode: str
    separating_witnesses: dict = field(default_factory=dict)
    vacuous_conditions: tuple = ()
    suspicious_conditions: tuple = ()
    counterexample: Optional[tuple] = None

    @property
    def holds(self) -> bool:
        return self.kind in ("certified-true", "probable-true") and not self.suspicious_conditions

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "dim": self.dim,
            "mode": self.mode,
            "holds": self.holds,
            "separating_witnesses": {
                f"{list(subset)}|{xp}": flag.to_json()
                for (subset, xp), flag in self.separating_witnesses.items()
            },
            "vacuous_conditions": [f"{list(s)}|{x}" for s, x in self.vacuous_conditions],
            "suspicious_conditions": [f"{list(s)}|{x}" for s, x in self.suspicious_conditions],
        }
        if self.counterexample is not None:
            s, x = self.counterexample
            out["counterexample"] = f"{list(s)}|{x}"
        return out


def _random_flag(rng: random.Random, d: int, bound: int) -> Flag:
    while True:
        m = QMatrix([[Fraction(rng.randint(-bound, bound)) for _ in range(d)] for _ in range(d)])
        if m.det != 0:
            return canonicalize(m)


def _hyperplane_form(x: Flag) -> list[Fraction]:
    """Linear form vanishing on V_{d-1}(x): the last row of basis^{-1}."""
    inv = x.basis.inverse()
    return list(inv.rows[x.dim - 1])


def _kernel_basis(forms: list[list[Fraction]], d: int) -> list[list[Fraction]]:
    """Exact basis of the joint kernel of the given linear forms."""
    rows = [list(f) for f in forms]
    pivots = {}
    r = 0
    for col in range(d):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [e * inv for e in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [e - f * p for e, p in zip(rows[i], rows[r])]
        pivots[col] = r
        r += 1
    basis = []
    for free in range(d):
        if free in pivots:
            continue
        vec = [Fraction(0)] * d
        vec[free] = Fraction(1)
        for col, prow in pivots.items():
            vec[col] = -rows[prow][free]
        basis.append(vec)
    return basis


def _structured_candidates(members: Sequence[Flag], rng: random.Random, d: int, bound: int, count: int):
    """Flags guaranteed to be non-transversal to every member.

    Two incidence routes put a flag z in the locus Y_x: its line V_1(z)
    can lie inside the hyperplane V_{d-1}(x), or its hyperplane V_{d-1}(z)
    can contain the line V_1(x).  Each candidate assigns a random route to
    each member: the first-route members constrain the first column of z
    to the exact intersection of their hyperplanes, the second-route
    members donate their first basis columns to later positions of z,
    and the remaining columns are random.
    """
    if len(members) > d - 1:
        return
    produced = 0
    attempts = 0
    while produced < count and attempts < 8 * count:
        attempts += 1
        routes = [rng.randrange(2) for _ in members]
        via_line = [m for m, r in zip(members, routes) if r == 0]
        via_hyperplane = [m for m, r in zip(members, routes) if r == 1]
        # first column: exact common point of the via_line hyperplanes
        if via_line:
            kernel = _kernel_basis([_hyperplane_form(m) for m in via_line], d)
            if not kernel:
                continue
            first = [Fraction(0)] * d
            while all(e == 0 for e in first):
                coeffs = [Fraction(rng.randint(-bound, bound)) for _ in kernel]
                first = [sum(c * vec[i] for c, vec in zip(coeffs, kernel)) for i in range(d)]
        else:
            first = [Fraction(rng.randint(-bound, bound)) for _ in range(d)]
        donated = [list(m.basis.column(0)) for m in via_hyperplane]
        if len(donated) > d - 2:
            continue  # not enough early columns to host every donation
        cols = [first] + donated
        while len(cols) < d:
            cols.append([Fraction(rng.randint(-bound, bound)) for _ in range(d)])
        m = QMatrix.from_columns(cols)
        if m.det != 0:
            produced += 1
            yield canonicalize(m)


def general_position_check(
    config: Configuration,
    mode: str = "exact-d2",
    seed: int = 0,
    trials: int = 64,
    entry_bound: int = 10,
    max_subset: Optional[int] = None,
) -> PositionVerdict:
    """Decide (d = 2) or probe (d >= 3) general position of a configuration.

    On the projective line non-transversal means equal, so the
    Configuration distinctness invariant already decides the question and
    the verdict is certified.  For d >= 3 each non-containment condition
    "the common Y-locus of E_0 is not inside Y_{x'}" is searched for an
    explicit separating flag, using structured candidates that are
    guaranteed to hit the common locus plus random ones; conditions whose
    common locus is never hit are reported as presumed vacuous.
    """
    d = config.dim
    if mode == "exact-d2":
        if d != 2:
            raise InputError("exact mode applies to the projective line only")
        # distinctness is enforced by the Configuration invariant
        return PositionVerdict(kind="certified-true", dim=d, mode=mode)
    if mode != "monte-carlo":
        raise InputError(f"unknown mode {mode!r}")

    pts = config.points
    cap = max_subset if max_subset is not None else d - 1
    witnesses = {}
    vacuous = []
    suspicious = []
    for size in range(1, min(cap, len(pts) - 1) + 1):
        for subset in _subsets(range(len(pts)), size):
            members = [pts[i] for i in subset]
            for xp_idx in range(len(pts)):
                if xp_idx in subset:
                    continue
                xprime = pts[xp_idx]
                found = None
                hit_locus = False
                child = stable_rng("gp-cond", seed, subset, xp_idx)

                def _stream():
                    yield from _structured_candidates(members, child, d, entry_bound, trials // 2)
                    for _ in range(trials // 2):
                        yield _random_flag(child, d, entry_bound)

                for z in _stream():
                    if any(transversal(z, m) for m in members):
                        continue  # not in the common Y-locus
                    hit_locus = True
                    if transversal(z, xprime):
                        found = z
                        break
                key = (subset, xp_idx)
                if found is not None:
                    witnesses[key] = found
                elif not hit_locus:
                    vacuous.append(key)
                else:
                    # locus points found but none escaped Y_{x'}: evidence
                    # of containment, not a certificate
                    suspicious.append(key)
    return PositionVerdict(
        kind="probable-true",
        dim=d,
        mode=mode,
        separating_witnesses=witnesses,
        vacuous_conditions=tuple(vacuous),
        suspicious_conditions=tuple(suspicious),
    )


def _subsets(items, size):
    import itertools

    return itertools.combinations(items, size)


@dataclass(frozen=True)
class EmptyIntersectionClaim:
    """Record of the guarantee that subfamilies larger than K have empty
    common Y-locus, with whatever direct verification the dimension allows."""

    k: int
    n_points: int
    verified_exactly: bool
    spot_check: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "K": self.k,
            "points": self.n_points,
            "verified_exactly": self.verified_exactly,
            "spot_check": self.spot_check,
        }


def empty_intersection_bound(
    config: Configuration,
    k: int,
    verdict: Optional[PositionVerdict] = None,
    seed: int = 0,
    samples: int = 0,
    entry_bound: int = 10,
) -> EmptyIntersectionClaim:
    """Record the size-K guarantee for a general-position configuration.

    For d = 2 the guarantee is verified directly: the Y-sets are distinct
    singletons, so any two of them are disjoint and every subfamily of
    size > K >= 1 has empty intersection.  For d >= 3 an optional sample
    of flags is drawn and none may lie in more than K of the Y-sets.
    """
    if k < 1:
        raise InputError("K must be positive")
    d = config.dim
    if verdict is None:
        mode = "exact-d2" if d == 2 else "monte-carlo"
        verdict = general_position_check(config, mode=mode, seed=seed)
    if not verdict.holds:
        raise InputError("general position must hold before recording the bound")
    if d == 2:
        # distinct singletons: any 2 of them intersect emptily
        return EmptyIntersectionClaim(k=k, n_points=len(config.points), verified_exactly=True)
    spot = None
    if samples:
        rng = stable_rng("empty-intersection", seed)
        point_cols = [_integer_columns(p) for p in config.points]
        worst = 0
        drawn = 0
        while drawn < samples:
            cols = [[rng.randint(-entry_bound, entry_bound) for _ in range(d)] for _ in range(d)]
            if _int_det([[cols[j][i] for j in range(d)] for i in range(d)]) == 0:
                continue
            drawn += 1
            depth = sum(1 for pc in point_cols if not _transversal_int(cols, pc, d))
            worst = max(worst, depth)
        if worst > k:
            raise InputError(f"sampled flag lies in {worst} > K Y-sets; K too small")
        spot = {"samples": samples, "max_depth_seen": worst}
    return EmptyIntersectionClaim(k=k, n_points=len(config.points), verified_exactly=False, spot_check=spot)


def _integer_columns(x: Flag) -> list[list[int]]:
    """Primitive integer scalings of the canonical columns.

    Column scaling preserves every transversality determinant condition.
    """
    out = []
    for j in range(x.dim):
        col = x.basis.column(j)
        lcm = 1
        for e in col:
            lcm = lcm * e.denominator // math.gcd(lcm, e.denominator)
        out.append([int(e * lcm) for e in col])
    return out


def _int_det(rows: list[list[int]]) -> int:
    """Fraction-free (Bareiss) integer determinant."""
    n = len(rows)
    m = [row[:] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _transversal_int(xcols: list[list[int]], ycols: list[list[int]], d: int) -> bool:
    for i in range(1, d):
        cols = xcols[:i] + ycols[: d - i]
        rows = [[cols[j][r] for j in range(d)] for r in range(d)]
        if _int_det(rows) == 0:
            return False
    return True
