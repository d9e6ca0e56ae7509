"""Certified enclosures for singular values and eigenvalue moduli.

All spectral quantities of a rational matrix are algebraic over Q, so they
are pinned down exactly by integer polynomials and isolating intervals.
Root isolation (including complex boxes) is delegated to sympy's exact
Collins-Krandick machinery; refinement of real roots is done here by plain
sign bisection on the squarefree part, which is much faster than asking
the isolator for tight intervals.

Equality of the moduli of two roots is decided exactly through the product
polynomial

    S(t) = Res_z( p(z), z^deg(p) * p(t/z) ),

whose roots are the pairwise products of roots of p; in particular every
squared modulus |mu|^2 = mu * conj(mu) is a real root of S.  Two roots have
equal modulus iff their squared-modulus enclosures land in the same
isolating interval of S.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import sympy

from .certreal import DEFAULT_BITS, MAX_BITS, Interval, iv_ln
from .errors import PrecisionError, SingularMatrixError
from .qlinalg import QMatrix

_t = sympy.Symbol("t")
_z = sympy.Symbol("z")


def clear_denominators(coeffs: list[Fraction]) -> list[int]:
    """Primitive integer polynomial with the same roots (leading first)."""
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _horner(coeffs: list[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


class _RootSlot:
    """One distinct root of the polynomial: a real interval or a complex box.

    ``fac`` is the squarefree irreducible-over-refinement factor the root
    belongs to; bisection and box refinement evaluate that factor only, so
    roots of other factors can never be confused with this one.
    """

    __slots__ = ("is_real", "lo", "hi", "re_lo", "re_hi", "im_lo", "im_hi", "mult", "s_id", "fac")

    def __init__(self, *, is_real, mult, fac, lo=None, hi=None, re_lo=None, re_hi=None, im_lo=None, im_hi=None):
        self.is_real = is_real
        self.mult = mult
        self.fac = fac
        self.lo, self.hi = lo, hi
        self.re_lo, self.re_hi = re_lo, re_hi
        self.im_lo, self.im_hi = im_lo, im_hi
        self.s_id: Optional[int] = None

    def modulus_sq_interval(self) -> Interval:
        if self.is_real:
            a, b = abs(self.lo), abs(self.hi)
            if self.lo <= 0 <= self.hi:
                return Interval(0, max(a, b) ** 2)
            lo, hi = min(a, b), max(a, b)
            return Interval(lo * lo, hi * hi)
        res = [self.re_lo * self.re_lo, self.re_hi * self.re_hi]
        ims = [self.im_lo * self.im_lo, self.im_hi * self.im_hi]
        re_min = Fraction(0) if self.re_lo <= 0 <= self.re_hi else min(res)
        im_min = Fraction(0) if self.im_lo <= 0 <= self.im_hi else min(ims)
        return Interval(re_min + im_min, max(res) + max(ims))


class PolyRoots:
    """Isolated roots of an integer polynomial with refinement on demand.

    Instances are cached per coefficient tuple, so repeated queries refine
    the same isolating intervals; enclosures only ever shrink.
    """

    def __init__(self, icoeffs: tuple[int, ...]):
        if icoeffs[0] == 0:
            raise ValueError("leading coefficient must be nonzero")
        self.coeffs = icoeffs
        poly = sympy.Poly(list(icoeffs), _t)
        self.sqf = tuple(int(c) for c in poly.sqf_part().all_coeffs())
        self.slots: list[_RootSlot] = []
        self._box_eps: dict[tuple[int, ...], Fraction] = {}
        # Isolate per irreducible factor: the complex isolator requires a
        # squarefree input, and a rational interval endpoint can never be
        # a root of an irreducible factor of degree >= 2, so bisection on
        # the factor always starts from a nonzero sign.
        _, factors = sympy.Poly(list(icoeffs), _t).factor_list()
        for fac_poly, mult in factors:
            fac = tuple(int(c) for c in fac_poly.all_coeffs())
            real_part, complex_part = fac_poly.intervals(all=True)
            for (a, b), _one in real_part:
                self.slots.append(_RootSlot(is_real=True, mult=mult, fac=fac, lo=Fraction(a), hi=Fraction(b)))
            for (c1, c2), _one in complex_part:
                self.slots.append(
                    _RootSlot(
                        is_real=False,
                        mult=mult,
                        fac=fac,
                        re_lo=Fraction(sympy.Rational(sympy.re(c1))),
                        re_hi=Fraction(sympy.Rational(sympy.re(c2))),
                        im_lo=Fraction(sympy.Rational(sympy.im(c1))),
                        im_hi=Fraction(sympy.Rational(sympy.im(c2))),
                    )
                )
            self._box_eps[fac] = Fraction(1, 2)
        self._product_roots: Optional["PolyRoots"] = None

    # -- real root refinement ------------------------------------------------

    def refine_real(self, slot: _RootSlot, width: Fraction, max_bits: int = MAX_BITS) -> None:
        """Shrink a real isolating interval below the requested width."""
        if slot.lo == slot.hi:
            return
        fac = list(slot.fac)
        lo, hi = slot.lo, slot.hi
        s_lo = _horner(fac, lo)
        if s_lo == 0:  # endpoint happens to be the root
            slot.lo = slot.hi = lo
            return
        steps = 0
        while hi - lo > width:
            mid = (lo + hi) / 2
            s_mid = _horner(fac, mid)
            if s_mid == 0:
                slot.lo = slot.hi = mid
                return
            if (s_mid < 0) == (s_lo < 0):
                lo, s_lo = mid, s_mid
            else:
                hi = mid
            steps += 1
            if steps > max_bits + 128:
                raise PrecisionError("real-root bisection exceeded the precision cap")
        slot.lo, slot.hi = lo, hi

    def refine_box(self, slot: _RootSlot, eps: Fraction) -> None:
        """Shrink the complex boxes of one factor via the exact isolator."""
        if slot.is_real:
            raise ValueError("refine_box on a real slot")
        fac = slot.fac
        while self._box_eps[fac] > eps:
            self._box_eps[fac] /= 16
            _, complex_part = sympy.Poly(list(fac), _t).intervals(all=True, eps=sympy.Rational(self._box_eps[fac]))
            boxes = []
            for (c1, c2), _one in complex_part:
                boxes.append(
                    (
                        Fraction(sympy.Rational(sympy.re(c1))),
                        Fraction(sympy.Rational(sympy.re(c2))),
                        Fraction(sympy.Rational(sympy.im(c1))),
                        Fraction(sympy.Rational(sympy.im(c2))),
                    )
                )
            for s in self.slots:
                if s.is_real or s.fac != fac:
                    continue
                matches = [
                    b
                    for b in boxes
                    if b[0] <= s.re_hi and s.re_lo <= b[1] and b[2] <= s.im_hi and s.im_lo <= b[3]
                ]
                if len(matches) != 1:
                    raise PrecisionError("complex box refinement lost track of a root")
                s.re_lo, s.re_hi, s.im_lo, s.im_hi = matches[0]

    # -- squared-modulus identification ---------------------------------------

    def product_roots(self) -> "PolyRoots":
        """Roots of S(t) = Res_z(p(z), z^d p(t/z)) on the squarefree part."""
        if self._product_roots is None:
            if self.coeffs[-1] == 0:
                raise SingularMatrixError("modulus queries require a nonzero constant term")
            p = sympy.Poly(list(self.sqf), _z)
            d = p.degree()
            g = sympy.expand(_z**d * sympy.Poly(list(self.sqf), _t).as_expr().subs(_t, _t / _z))
            s_expr = sympy.resultant(p.as_expr(), g, _z)
            s_coeffs = clear_denominators([Fraction(c) for c in sympy.Poly(s_expr, _t).all_coeffs()])
            self._product_roots = PolyRoots(tuple(s_coeffs))
        return self._product_roots

    def s_id(self, slot: _RootSlot, max_bits: int = MAX_BITS) -> int:
        """Index of the real root of S equal to this root's squared modulus."""
        if slot.s_id is not None:
            return slot.s_id
        spr = self.product_roots()
        s_slots = [s for s in spr.slots if s.is_real]
        box_eps = self._box_eps[slot.fac] if not slot.is_real else None
        for _ in range(max_bits + 64):
            iv = slot.modulus_sq_interval()
            cands = []
            for idx, s in enumerate(s_slots):
                if s.lo <= iv.hi and iv.lo <= s.hi:
                    cands.append(idx)
            if len(cands) == 1:
                slot.s_id = cands[0]
                return slot.s_id
            if len(cands) == 0:
                # the squared modulus is a root of S, so enclosure mismatch
                # means stale widths; refine everything and retry
                pass
            for idx in cands or range(len(s_slots)):
                spr.refine_real(s_slots[idx], max(s_slots[idx].hi - s_slots[idx].lo, Fraction(1, 4)) / 16)
            if slot.is_real:
                self.refine_real(slot, max((slot.hi - slot.lo) / 16, Fraction(0)))
            else:
                box_eps /= 16
                self.refine_box(slot, box_eps)
        raise PrecisionError("squared-modulus identification did not converge")

    def root_interval_rel(self, slot: _RootSlot, rel_width: Fraction, max_bits: int = MAX_BITS) -> Interval:
        """Enclosure of a positive real root with hi - lo <= rel_width * lo."""
        if not slot.is_real:
            raise ValueError("root_interval_rel on a complex slot")
        if slot.hi <= 0:
            raise ValueError("root_interval_rel expects a positive root")
        steps = 0
        while slot.hi != slot.lo and (slot.hi - slot.lo > slot.lo * rel_width or slot.lo <= 0):
            self.refine_real(slot, (slot.hi - slot.lo) / 16, max_bits)
            steps += 1
            if steps > max_bits:
                raise PrecisionError("root refinement exceeded the precision cap")
        return Interval(slot.lo, slot.hi)

    def modulus_sq(self, slot: _RootSlot, rel_width: Fraction, max_bits: int = MAX_BITS) -> Interval:
        """Enclosure of |root|^2 with hi - lo <= rel_width * lo."""
        if slot.is_real and slot.lo == slot.hi:
            v = slot.lo * slot.lo
            return Interval(v, v)
        if slot.is_real:
            iv = slot.modulus_sq_interval()
            steps = 0
            while iv.width > iv.lo * rel_width or iv.lo <= 0:
                self.refine_real(slot, (slot.hi - slot.lo) / 16, max_bits)
                iv = slot.modulus_sq_interval()
                steps += 1
                if steps > max_bits:
                    raise PrecisionError("modulus refinement exceeded the precision cap")
            return iv
        # complex root: refine the matching real root of S instead of the box
        sid = self.s_id(slot, max_bits)
        spr = self.product_roots()
        s_slot = [s for s in spr.slots if s.is_real][sid]
        iv = Interval(s_slot.lo, s_slot.hi)
        steps = 0
        while s_slot.lo != s_slot.hi and (iv.width > iv.lo * rel_width or iv.lo <= 0):
            spr.refine_real(s_slot, (s_slot.hi - s_slot.lo) / 16, max_bits)
            iv = Interval(s_slot.lo, s_slot.hi)
            steps += 1
            if steps > max_bits:
                raise PrecisionError("modulus refinement exceeded the precision cap")
        return Interval(s_slot.lo, s_slot.hi)


@lru_cache(maxsize=512)
def poly_roots(icoeffs: tuple[int, ...]) -> PolyRoots:
    return PolyRoots(icoeffs)


def _bits_for(eps: Fraction) -> int:
    if eps >= 1:
        return DEFAULT_BITS
    # -log2(eps) from integer bit lengths; safe for astronomically small eps
    mag = eps.denominator.bit_length() - eps.numerator.bit_length() + 1
    return max(DEFAULT_BITS, mag + 8)


def _check_cap(eps: Fraction, max_bits: int) -> int:
    bits = _bits_for(eps)
    if bits > max_bits:
        raise PrecisionError(
            f"enclosure width {eps} needs ~{bits} fractional bits, above the cap {max_bits}"
        )
    return bits


def _log_of_root_intervals(entries: list[tuple[Interval, int]], eps: Fraction, bits: int) -> list[Interval]:
    """Half-logs of squared-value enclosures, expanded by multiplicity."""
    out = []
    for iv, mult in entries:
        if iv.lo == iv.hi == 1:
            liv = Interval(0)
        else:
            liv = iv_ln(iv, bits).scale(Fraction(1, 2))
        out.extend([liv] * mult)
    return out


def log_singular_values(m: QMatrix, eps: Fraction, max_bits: int = MAX_BITS) -> list[Interval]:
    """Enclosures of log sigma_1 >= ... >= log sigma_d, widths <= eps.

    The squared singular values are the roots of char(M^T M), which are
    real and positive for invertible M.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    bits = _check_cap(eps, max_bits)
    if m.det == 0:
        raise SingularMatrixError("singular values of a singular matrix")
    gram = m.transpose() * m
    coeffs = clear_denominators(list(gram.char_poly))
    roots = poly_roots(tuple(coeffs))
    rel = eps / 4  # ln-width <= relative width of the squared value
    entries = []
    for slot in roots.slots:
        if not slot.is_real:
            raise PrecisionError("Gram matrix produced a non-real root")
        iv = roots.root_interval_rel(slot, rel, max_bits)
        entries.append((iv, slot.mult))
    entries.sort(key=lambda e: e[0].lo)
    logs = _log_of_root_intervals(entries, eps, bits)
    logs.reverse()
    return logs


def log_eigen_moduli(m: QMatrix, eps: Fraction, max_bits: int = MAX_BITS) -> list[Interval]:
    """Enclosures of log|mu_1| >= ... >= log|mu_d| over the complex spectrum."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    bits = _check_cap(eps, max_bits)
    if m.det == 0:
        raise SingularMatrixError("eigenvalue moduli of a singular matrix")
    coeffs = clear_denominators(list(m.char_poly))
    roots = poly_roots(tuple(coeffs))
    rel = eps / 4
    entries = [(roots.modulus_sq(slot, rel, max_bits), slot.mult) for slot in roots.slots]
    if _pairwise_disjoint([iv for iv, _ in entries]):
        entries.sort(key=lambda e: e[0].lo)
    else:
        ids = [roots.s_id(slot, max_bits) for slot in roots.slots]
        order = _order_by_s_root(roots, ids)
        entries = [entries[i] for i in order]
    logs = _log_of_root_intervals(entries, eps, bits)
    logs.reverse()
    return logs


def moduli_all_distinct(m: QMatrix, max_bits: int = MAX_BITS) -> bool:
    """Exact decision: are the d eigenvalue moduli pairwise distinct?

    Interval separation decides the generic case; persistent overlaps are
    settled exactly by squared-modulus identification in S.
    """
    if m.det == 0:
        raise SingularMatrixError("moduli of a singular matrix")
    coeffs = clear_denominators(list(m.char_poly))
    roots = poly_roots(tuple(coeffs))
    if any(slot.mult > 1 for slot in roots.slots):
        return False
    if len(roots.slots) <= 1:
        return len(roots.slots) == 1 and roots.slots[0].mult == 1
    # Complex roots come in conjugate pairs with equal moduli.
    if any(not slot.is_real for slot in roots.slots):
        return False
    for rounds in range(3):
        ivs = [slot.modulus_sq_interval() for slot in roots.slots]
        if _pairwise_disjoint(ivs):
            return True
        for slot in roots.slots:
            roots.refine_real(slot, (slot.hi - slot.lo) / 256 if slot.hi > slot.lo else Fraction(0), max_bits)
    ids = [roots.s_id(slot, max_bits) for slot in roots.slots]
    return len(set(ids)) == len(ids)


def equal_modulus(m: QMatrix, i: int, j: int, max_bits: int = MAX_BITS) -> bool:
    """Exact |mu_i| == |mu_j| for the i-th and j-th distinct roots."""
    coeffs = clear_denominators(list(m.char_poly))
    roots = poly_roots(tuple(coeffs))
    return roots.s_id(roots.slots[i], max_bits) == roots.s_id(roots.slots[j], max_bits)


def _pairwise_disjoint(ivs: list[Interval]) -> bool:
    for a in range(len(ivs)):
        for b in range(a + 1, len(ivs)):
            if ivs[a].overlaps(ivs[b]):
                return False
    return True


def _order_by_s_root(roots: PolyRoots, ids: list[int]) -> list[int]:
    spr = roots.product_roots()
    s_slots = [s for s in spr.slots if s.is_real]
    keys = []
    for idx, sid in enumerate(ids):
        s = s_slots[sid]
        keys.append(((s.lo + s.hi) / 2, idx))
    keys.sort()
    return [idx for _, idx in keys]


def real_root_enclosures(coeffs: list[Fraction], eps: Fraction, max_bits: int = MAX_BITS) -> list[tuple[Interval, int]]:
    """Isolated real roots of a rational polynomial, refined to width <= eps.

    Returns (interval, multiplicity) pairs in ascending root order.
    """
    eps = Fraction(eps)
    _check_cap(eps, max_bits)
    ints = clear_denominators(coeffs)
    roots = poly_roots(tuple(ints))
    out = []
    for slot in roots.slots:
        if not slot.is_real:
            continue
        roots.refine_real(slot, eps, max_bits)
        out.append((Interval(slot.lo, slot.hi), slot.mult))
    out.sort(key=lambda e: e[0].lo)
    return out


def trailing_zero_multiplicity(coeffs: list[Fraction]) -> int:
    """Multiplicity of 0 as a root (number of trailing zero coefficients)."""
    k = 0
    for c in reversed(coeffs):
        if c != 0:
            break
        k += 1
    return k
