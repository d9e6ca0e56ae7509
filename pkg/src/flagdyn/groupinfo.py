"""Finite-radius evidence reports about a matrix group.

Zariski density of a subgroup is not decidable from finitely many
elements; these reports collect necessary conditions instead: the exact
rank of the linear span of a word ball (a group acting absolutely
irreducibly spans the full matrix algebra), existence of a loxodromic
element, existence of an infinite-order element, and say so.  The p-adic
report tracks how large the entries of a ball get in the p-adic absolute
value, as boundedness evidence at a finite radius.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dynamics import is_loxodromic
from .errors import InputError
from .padic import is_prime, vp
from .qlinalg import rank
from .words import GroupPresentation, enumerate_ball, torsion_bound

DENSITY_DISCLAIMER = (
    "necessary-condition evidence only: Zariski density is not decidable "
    "from a finite ball; a failed check refutes density, a passed check "
    "does not certify it"
)


@dataclass(frozen=True)
class DensityEvidence:
    span_dim: int
    burnside_full: bool
    loxodromic_found: bool
    infinite: bool
    radius: int
    dim: int
    disclaimer: str = DENSITY_DISCLAIMER

    def to_json(self):
        return {
            "span_dim": self.span_dim,
            "burnside_full": self.burnside_full,
            "loxodromic_found": self.loxodromic_found,
            "infinite": self.infinite,
            "radius": self.radius,
            "dimension": self.dim,
            "disclaimer": self.disclaimer,
        }


def density_evidence(group: GroupPresentation, radius: int, cache_dir: str | None = None) -> DensityEvidence:
    """Exact rank of the ball's span in d^2-space plus dynamical evidence.

    An element g is certified of infinite order when g^m != 1 for the
    torsion exponent m of the dimension: finite-order rational matrices
    satisfy g^m = 1, so the test is exact.
    """
    if radius < 1:
        raise InputError("radius must be >= 1")
    ball = enumerate_ball(group, radius, cache_dir)
    vectors = [[e for row in mat.rows for e in row] for _word, mat in ball]
    span = rank(vectors)
    d = group.dim
    lox = False
    infinite = False
    m = torsion_bound(d)
    for _word, mat in ball:
        if not infinite and not mat.pow(m).is_identity():
            infinite = True
        if not lox and not mat.is_identity() and is_loxodromic(mat):
            lox = True
        if lox and infinite:
            break
    return DensityEvidence(
        span_dim=span,
        burnside_full=(span == d * d),
        loxodromic_found=lox,
        infinite=infinite,
        radius=radius,
        dim=d,
    )


@dataclass(frozen=True)
class PadicBoundednessReport:
    prime: int
    radius: int
    max_abs: Fraction  # p^{-min valuation}, exact
    max_abs_half_radius: Fraction
    trend: str  # "flat" | "growing"

    def to_json(self):
        from .qlinalg import rat_str

        return {
            "prime": self.prime,
            "radius": self.radius,
            "max_abs": rat_str(self.max_abs),
            "max_abs_half_radius": rat_str(self.max_abs_half_radius),
            "trend": self.trend,
        }


def _ball_max_abs(group: GroupPresentation, p: int, radius: int, cache_dir) -> Fraction:
    worst: Optional[int] = None  # minimal valuation over entries
    for _word, mat in enumerate_ball(group, radius, cache_dir):
        for row in mat.rows:
            for e in row:
                if e == 0:
                    continue
                v = vp(e, p)
                if worst is None or v < worst:
                    worst = v
    if worst is None:
        return Fraction(0)
    return Fraction(p) ** (-worst)


def padic_boundedness(
    group: GroupPresentation, p: int, radius: int, cache_dir: str | None = None
) -> PadicBoundednessReport:
    """Largest p-adic absolute value of a matrix entry over the word ball.

    Balls nest, so the maximum is nondecreasing in the radius; comparing
    the half-radius ball shows whether growth is still visible.
    """
    if radius < 1:
        raise InputError("radius must be >= 1")
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    full = _ball_max_abs(group, p, radius, cache_dir)
    half = _ball_max_abs(group, p, max(1, radius // 2), cache_dir)
    trend = "growing" if full > half else "flat"
    return PadicBoundednessReport(prime=p, radius=radius, max_abs=full, max_abs_half_radius=half, trend=trend)
