"""Cartan and Jordan projections, loxodromic elements and their dynamics.

The Cartan projection of a determinant-one matrix at the real place is the
weakly decreasing vector of log singular values; at a finite place it is
the negated, reversed vector of elementary-divisor valuations scaled by
log p.  The Jordan projection collects log eigenvalue moduli.  An element
is loxodromic when its d eigenvalue moduli are pairwise distinct; it then
has all-real spectrum, a unique attracting flag (eigenspaces ordered by
decreasing modulus) and a repelling flag which is the attracting flag of
the inverse, and its powers contract the complement of any neighborhood
of the repelling non-transversality locus into any neighborhood of the
attracting flag.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import sympy

from .config import stable_rng
from .certreal import DEFAULT_BITS, MAX_BITS, Interval, ln_frac
from .errors import (
    ExceededNMaxError,
    InputError,
    MisalignedFixedPointsError,
    NoLoxodromicError,
    NotLoxodromicError,
    PrecisionError,
)
from .flags import Flag, canonicalize, transversal
from .padic import smith_valuations
from .qlinalg import QMatrix
from .rp1 import QuadVal, RP1Point
from .spectra import clear_denominators, log_eigen_moduli, log_singular_values, moduli_all_distinct
from .words import GroupPresentation, enumerate_ball

RealPlace = "real"

FixedPoint = Union[RP1Point, Flag]


@dataclass(frozen=True)
class WeylVector:
    """A weakly decreasing traceless vector of certified reals."""

    place: Union[str, tuple[str, int]]
    entries: tuple[Interval, ...]
    valuations: Optional[tuple[int, ...]] = None  # exact p-adic data, increasing

    def reversed_negated(self) -> "WeylVector":
        ents = tuple(-e for e in reversed(self.entries))
        vals = None if self.valuations is None else tuple(-v for v in reversed(self.valuations))
        return WeylVector(self.place, ents, vals)

    def simple_root_values(self) -> tuple[Interval, ...]:
        """alpha_i = entry_i - entry_{i+1} for i = 1..d-1."""
        return tuple(self.entries[i] - self.entries[i + 1] for i in range(len(self.entries) - 1))

    def to_json(self):
        place = self.place if isinstance(self.place, str) else {"padic": self.place[1]}
        out = {"place": place, "entries": [e.to_json() for e in self.entries]}
        if self.valuations is not None:
            out["valuations"] = list(self.valuations)
        return out


def cartan(
    g: QMatrix,
    place: Union[str, tuple[str, int]] = RealPlace,
    eps: Fraction = Fraction(1, 2**30),
    max_bits: int = MAX_BITS,
) -> WeylVector:
    """Cartan projection at the real place or at a prime.

    Real place: decreasing log singular values.  Finite place p: the
    elementary-divisor valuations v_1 <= ... <= v_d give the entries
    -v_i log p sorted decreasingly; these are exact integer data times an
    enclosure of log p.
    """
    if g.det not in (1, -1):
        raise InputError("Cartan projection expects determinant +-1")
    if place == RealPlace:
        return WeylVector(RealPlace, tuple(log_singular_values(g, eps, max_bits)))
    kind, p = place
    if kind != "padic":
        raise InputError(f"unknown place {place!r}")
    vv = smith_valuations(g, p)
    lnp = ln_frac(Fraction(p), max(DEFAULT_BITS, _bits_of(eps)))
    entries = tuple(lnp.scale(-v) for v in vv.vals)  # increasing v -> decreasing entries
    return WeylVector(("padic", p), entries, valuations=vv.vals)


def _bits_of(eps: Fraction) -> int:
    if eps >= 1:
        return DEFAULT_BITS
    return eps.denominator.bit_length() - eps.numerator.bit_length() + 5


def jordan(g: QMatrix, eps: Fraction = Fraction(1, 2**30), max_bits: int = MAX_BITS) -> WeylVector:
    """Jordan projection: decreasing log eigenvalue moduli."""
    if g.det not in (1, -1):
        raise InputError("Jordan projection expects determinant +-1")
    return WeylVector(RealPlace, tuple(log_eigen_moduli(g, eps, max_bits)))


def is_loxodromic(g: QMatrix, max_bits: int = MAX_BITS) -> bool:
    """True iff the d eigenvalue moduli are pairwise distinct (exact)."""
    return moduli_all_distinct(g, max_bits)


@dataclass(frozen=True)
class ProximalData:
    """A loxodromic element with its fixed pair and spectral gap."""

    g: QMatrix
    attracting: FixedPoint
    repelling: FixedPoint
    gap: Interval
    certified: bool = True

    def __post_init__(self):
        if isinstance(self.attracting, RP1Point):
            if self.attracting == self.repelling:
                raise NotLoxodromicError("fixed points must be distinct")
        else:
            if not transversal(self.attracting, self.repelling):
                raise NotLoxodromicError("fixed flags must be transversal")

    def to_json(self) -> dict:
        def point_json(p):
            if isinstance(p, RP1Point):
                if p.is_rational():
                    return p.to_json()
                enc = p.xi.enclosure(48)
                return {"chart_enclosure": enc.to_json()}
            return p.to_json()

        return {
            "matrix": self.g.to_json(),
            "attracting": point_json(self.attracting),
            "repelling": point_json(self.repelling),
            "gap": self.gap.to_json(),
            "certified": self.certified,
        }


def _rp1_fixed_points(g: QMatrix) -> tuple[RP1Point, RP1Point]:
    """Exact attracting/repelling points of a loxodromic 2x2 matrix.

    Eigenvalues (tau +- sqrt(tau^2 - 4 det))/2 are real with distinct
    moduli; the dominant one has the sign of tau.  Eigenvectors live in
    the quadratic extension by the discriminant.
    """
    a, b = g[0, 0], g[0, 1]
    c, d = g[1, 0], g[1, 1]
    tau = a + d
    disc = tau * tau - 4 * g.det
    if disc <= 0 or tau == 0:
        raise NotLoxodromicError("2x2 element has equal eigenvalue moduli")
    if b == 0 and c == 0:
        dom_first = abs(a) > abs(d)
        attr = RP1Point.infinity() if dom_first else RP1Point.affine(0)
        rep = RP1Point.affine(0) if dom_first else RP1Point.infinity()
        return attr, rep
    sq = QuadVal.sqrt_of(disc)
    lam_plus = (QuadVal(tau) + sq) * Fraction(1, 2)
    lam_minus = (QuadVal(tau) - sq) * Fraction(1, 2)
    lam_dom, lam_sub = (lam_plus, lam_minus) if tau > 0 else (lam_minus, lam_plus)

    def eigvec(lam: QuadVal) -> RP1Point:
        if b != 0:
            return RP1Point.from_pair(QuadVal(b), lam - a)
        return RP1Point.from_pair(lam - d, QuadVal(c))

    return eigvec(lam_dom), eigvec(lam_sub)


def _rational_spectrum(g: QMatrix) -> Optional[list[Fraction]]:
    """All eigenvalues if the characteristic polynomial splits over Q."""
    coeffs = clear_denominators(list(g.char_poly))
    t = sympy.Symbol("t")
    poly = sympy.Poly(coeffs, t)
    roots = sympy.roots(poly, multiple=True)
    if len(roots) != g.dim or any(not r.is_rational for r in roots):
        return None
    return [Fraction(sympy.Rational(r)) for r in roots]


def _kernel_vector(m: QMatrix) -> list[Fraction]:
    """A nonzero rational kernel vector of a singular matrix."""
    n = m.dim
    rows = [list(r) for r in m.rows]
    pivots = {}
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, n) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [e * inv for e in rows[r]]
        for i in range(n):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [e - f * p for e, p in zip(rows[i], rows[r])]
        pivots[col] = r
        r += 1
    free = next(col for col in range(n) if col not in pivots)
    vec = [Fraction(0)] * n
    vec[free] = Fraction(1)
    for col, prow in pivots.items():
        vec[col] = -rows[prow][free]
    return vec


def _spectral_gap(g: QMatrix, max_bits: int = MAX_BITS) -> Interval:
    """Certified positive enclosure of min_i (lambda_i - lambda_{i+1})."""
    eps = Fraction(1, 2**20)
    while True:
        ents = log_eigen_moduli(g, eps, max_bits)
        gaps = [ents[i] - ents[i + 1] for i in range(len(ents) - 1)]
        gap = gaps[0]
        for cand in gaps[1:]:
            if cand.lo < gap.lo:
                gap = cand
        if gap.lo > 0:
            return gap
        eps /= 16
        if _bits_of(eps) > max_bits:
            raise PrecisionError("could not certify a positive spectral gap")


def attracting_repelling(g: QMatrix, max_bits: int = MAX_BITS) -> ProximalData:
    """Fixed data of a loxodromic element.

    d = 2: exact points in the quadratic extension by the discriminant.
    d >= 3 with rational spectrum: exact flags of eigenspaces ordered by
    decreasing modulus.  Otherwise a rational approximation of the
    eigenflags is returned with certified=False.
    """
    if not is_loxodromic(g, max_bits):
        raise NotLoxodromicError("element does not have pairwise distinct eigenvalue moduli")
    gap = _spectral_gap(g, max_bits)
    if g.dim == 2:
        attr, rep = _rp1_fixed_points(g)
        return ProximalData(g, attr, rep, gap, certified=True)
    spectrum = _rational_spectrum(g)
    if spectrum is not None:
        order = sorted(spectrum, key=lambda lam: abs(lam), reverse=True)
        eye = QMatrix.identity(g.dim)
        vecs = [_kernel_vector(g.add(eye.scale(-lam))) for lam in order]
        attr = canonicalize(QMatrix.from_columns(vecs))
        rep = canonicalize(QMatrix.from_columns(list(reversed(vecs))))
        return ProximalData(g, attr, rep, gap, certified=True)
    attr = _approx_eigenflag(g, max_bits)
    rep = _approx_eigenflag(g.inverse(), max_bits)
    return ProximalData(g, attr, rep, gap, certified=False)


def _approx_eigenflag(g: QMatrix, max_bits: int) -> Flag:
    """Rational approximation of the decreasing-modulus eigenflag.

    Loxodromic spectra are real, so each eigenvector is approximated by a
    kernel vector of g - lam_hat I at a rational midpoint lam_hat of the
    refined eigenvalue enclosure, via the adjugate column of largest norm.
    """
    from .spectra import poly_roots

    coeffs = clear_denominators(list(g.char_poly))
    roots = poly_roots(tuple(coeffs))
    slots = [s for s in roots.slots if s.is_real]
    if len(slots) != g.dim:
        raise PrecisionError("approximate eigenflag needs an all-real spectrum")
    refined = []
    for s in slots:
        roots.refine_real(s, Fraction(1, 2**48), max_bits)
        refined.append((Fraction(s.lo + s.hi, 2), abs(Fraction(s.lo + s.hi, 2))))
    refined.sort(key=lambda t: t[1], reverse=True)
    eye = QMatrix.identity(g.dim)
    cols = []
    for lam_hat, _ in refined:
        shifted = g.add(eye.scale(-lam_hat))
        adj = _adjugate(shifted)
        col = max((adj.column(j) for j in range(g.dim)), key=lambda c: sum(abs(e) for e in c))
        if all(e == 0 for e in col):
            raise PrecisionError("adjugate vanished; eigenvalue approximation too coarse")
        cols.append(list(col))
    return canonicalize(QMatrix.from_columns(cols))


def _adjugate(m: QMatrix) -> QMatrix:
    """Classical adjugate via cofactors (small dimensions only)."""
    n = m.dim
    from .qlinalg import _det

    cof = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [
                [m[r, c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            sign = -1 if (i + j) % 2 else 1
            row.append(sign * (_det(minor) if n > 1 else Fraction(1)))
        cof.append(row)
    return QMatrix(cof).transpose()


# -- contraction certification ---------------------------------------------------


@dataclass(frozen=True)
class ContractionCert:
    """Least power N with g^N(X minus V_minus) inside U_plus."""

    n: int
    certification: str  # "exact" | "sampled"
    params: Optional[dict] = None


def contraction_holds(g_pow: QMatrix, v_minus, u_plus) -> bool:
    """Exact d=2 test: does g_pow map the complement of V- into U+?"""
    comp = v_minus.complement()
    image = comp.image(g_pow)
    return u_plus.contains_descriptor(image)


def certify_contraction(
    g: QMatrix,
    v_minus,
    u_plus,
    n_max: int,
    *,
    seed: int = 0,
    grid_samples: int = 10**4,
    adversarial_samples: int = 10**3,
    max_bits: int = MAX_BITS,
) -> ContractionCert:
    """Minimal N <= n_max with g^N(X \\ V_minus) contained in U_plus.

    Preconditions: g loxodromic, its attracting fixed point interior to
    U_plus and its repelling fixed point interior to V_minus.  On the
    projective line the complement of an arc union is an arc union and
    its image is exact, so the verdict is exact and N is minimal.  For
    d >= 3 the containment is asserted from grid plus boundary-adversarial
    samples and labeled as such.
    """
    if not is_loxodromic(g, max_bits):
        raise NotLoxodromicError("contraction needs a loxodromic element")
    prox = attracting_repelling(g, max_bits)
    if g.dim == 2:
        if not u_plus.contains_interior_point(prox.attracting):
            raise MisalignedFixedPointsError("attracting fixed point not interior to U+")
        if not v_minus.contains_interior_point(prox.repelling):
            raise MisalignedFixedPointsError("repelling fixed point not interior to V-")
        g_pow = g
        for n in range(1, n_max + 1):
            if contraction_holds(g_pow, v_minus, u_plus):
                return ContractionCert(n, "exact")
            g_pow = g_pow * g
        raise ExceededNMaxError(f"no N <= {n_max} achieves the containment")
    return _certify_contraction_sampled(
        g, prox, v_minus, u_plus, n_max, seed, grid_samples, adversarial_samples
    )


def _certify_contraction_sampled(g, prox, v_minus, u_plus, n_max, seed, grid_samples, adversarial):
    from .witness import descriptor_membership

    if not descriptor_membership(u_plus, prox.attracting):
        raise MisalignedFixedPointsError("attracting flag not inside U+")
    if not descriptor_membership(v_minus, prox.repelling):
        raise MisalignedFixedPointsError("repelling flag not inside V-")
    rng = stable_rng("contraction", seed)
    d = g.dim
    samples: list[Flag] = []
    from .position import _random_flag

    tries = 0
    while len(samples) < grid_samples and tries < 40 * grid_samples:
        tries += 1
        z = _random_flag(rng, d, 10)
        if not descriptor_membership(v_minus, z):
            samples.append(z)
    # adversarial: perturbations of the repelling flag pushed just outside V-
    base = prox.repelling.basis
    tries = 0
    adv: list[Flag] = []
    while len(adv) < adversarial and tries < 50 * adversarial:
        tries += 1
        pert = [
            [e + Fraction(rng.randint(-1, 1), rng.randint(2, 64)) for e in row]
            for row in base.rows
        ]
        m = QMatrix(pert)
        if m.det == 0:
            continue
        z = canonicalize(m)
        if not descriptor_membership(v_minus, z):
            adv.append(z)
    all_samples = samples + adv
    g_pow = g
    for n in range(1, n_max + 1):
        if all(descriptor_membership(u_plus, canonicalize(g_pow * z.basis)) for z in all_samples):
            return ContractionCert(
                n,
                "sampled",
                {"grid": len(samples), "adversarial": len(adv), "seed": seed},
            )
        g_pow = g_pow * g
    raise ExceededNMaxError(f"no N <= {n_max} achieves the sampled containment")


# -- group-level searches ------------------------------------------------------


@dataclass(frozen=True)
class ThetaEstimate:
    """Word-ball suprema of the simple-root values of the Cartan projection."""

    suprema: tuple[Interval, ...]
    radius: int
    flagged: frozenset[int]  # 1-based indices of roots certified above threshold
    threshold: Fraction

    def to_json(self) -> dict:
        from .qlinalg import rat_str

        return {
            "suprema": [iv.to_json() for iv in self.suprema],
            "radius": self.radius,
            "flagged": sorted(self.flagged),
            "threshold": rat_str(Fraction(self.threshold)),
        }


def theta_estimate(
    group: GroupPresentation,
    radius: int,
    eps: Fraction = Fraction(1, 2**24),
    threshold: Optional[Fraction] = None,
    cache_dir: str | None = None,
) -> ThetaEstimate:
    """Max of each simple root over the Cartan image of a word ball.

    These suprema are monotone in the radius; a root whose supremum is
    certified above the threshold is evidence of unbounded growth in that
    root direction (the converse is not decidable at finite radius).
    """
    if radius < 0:
        raise InputError("radius must be >= 0")
    if threshold is None:
        from .certreal import ln2_interval

        threshold = ln2_interval(32).hi
    d = group.dim
    sup: list[Optional[Interval]] = [None] * (d - 1)
    for _word, mat in enumerate_ball(group, radius, cache_dir):
        kv = cartan(mat, RealPlace, eps)
        for i, alpha in enumerate(kv.simple_root_values()):
            cur = sup[i]
            sup[i] = alpha if cur is None else Interval(max(cur.lo, alpha.lo), max(cur.hi, alpha.hi))
    suprema = tuple(s if s is not None else Interval(0) for s in sup)
    flagged = frozenset(i + 1 for i, s in enumerate(suprema) if s.lo > threshold)
    return ThetaEstimate(suprema=suprema, radius=radius, flagged=flagged, threshold=threshold)


def find_loxodromic(
    group: GroupPresentation,
    radius_max: int,
    cache_dir: str | None = None,
    max_bits: int = MAX_BITS,
) -> tuple[str, ProximalData]:
    """Shortest-first search for a loxodromic element.

    Balls are grown radius by radius (each ball is a prefix of the next),
    so the search stops at the first radius containing a hit.
    """
    if radius_max < 1:
        raise InputError("search radius must be >= 1")
    scanned = 0
    for radius in range(1, radius_max + 1):
        ball = enumerate_ball(group, radius, cache_dir)
        for word, mat in ball[scanned:]:
            if not word:
                continue
            if is_loxodromic(mat, max_bits):
                return word, attracting_repelling(mat, max_bits)
        scanned = len(ball)
    raise NoLoxodromicError(f"no loxodromic element within radius {radius_max}")
