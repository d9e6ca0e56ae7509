from fractions import Fraction

import mpmath
import pytest

from flagdyn.dynamics import (
    attracting_repelling,
    cartan,
    certify_contraction,
    contraction_holds,
    find_loxodromic,
    is_loxodromic,
    jordan,
    theta_estimate,
)
from flagdyn.errors import (
    ExceededNMaxError,
    MisalignedFixedPointsError,
    NoLoxodromicError,
    NotLoxodromicError,
)
from flagdyn.flags import canonicalize, flag_distance, transversal
from flagdyn.qlinalg import QMatrix
from flagdyn.rp1 import Arc, QuadVal, RP1Point
from flagdyn.witness import SetDescriptor
from flagdyn.words import GroupPresentation, sanov_group

from conftest import encloses, random_unimodular

EPS = Fraction(1, 2**30)


def random_loxodromic_2x2(rng) -> QMatrix:
    while True:
        m = random_unimodular(rng, 2, steps=6)
        tr = m.trace()
        if tr * tr > 4:
            return m


def rational_spectrum_loxodromic(rng, d=3) -> QMatrix:
    diag = QMatrix.diagonal([4, 1, Fraction(1, 4)][:d])
    g = random_unimodular(rng, d)
    return g * diag * g.inverse()


# -- cartan ---------------------------------------------------------------


def test_cartan_real_diagonal():
    kv = cartan(QMatrix.diagonal([3, Fraction(1, 3)]), "real", EPS)
    assert encloses(kv.entries[0], mpmath.log(3))
    assert encloses(kv.entries[1], -mpmath.log(3))


def test_cartan_padic_diagonal():
    kv = cartan(QMatrix.diagonal([2, Fraction(1, 2)]), ("padic", 2), EPS)
    assert kv.valuations == (-1, 1)
    assert encloses(kv.entries[0], mpmath.log(2))
    assert encloses(kv.entries[1], -mpmath.log(2))


def test_cartan_padic_unimodular_shear():
    kv = cartan(QMatrix([[1, 2], [0, 1]]), ("padic", 2), EPS)
    assert kv.valuations == (0, 0)
    assert all(iv.lo == iv.hi == 0 for iv in kv.entries)


def test_opposition_involution_padic_exact(rng):
    for _ in range(30):
        g = random_unimodular(rng, 3, rational=True)
        for p in (2, 3, 5):
            kv = cartan(g, ("padic", p), EPS)
            kv_inv = cartan(g.inverse(), ("padic", p), EPS)
            assert kv_inv.valuations == kv.reversed_negated().valuations


def test_opposition_involution_real_overlap(rng):
    for _ in range(15):
        g = random_unimodular(rng, 3, rational=True)
        kv = cartan(g, "real", EPS)
        kv_inv = cartan(g.inverse(), "real", EPS)
        for a, b in zip(kv.entries, kv_inv.reversed_negated().entries):
            assert a.overlaps(b)


# -- jordan ---------------------------------------------------------------


def test_jordan_fibonacci():
    lam = jordan(QMatrix([[2, 1], [1, 1]]), EPS)
    mu = (3 + mpmath.sqrt(5)) / 2
    assert encloses(lam.entries[0], mpmath.log(mu))
    assert encloses(lam.entries[1], -mpmath.log(mu))


def test_jordan_unipotent_exact_zero():
    lam = jordan(QMatrix([[1, 1], [0, 1]]), EPS)
    assert all(iv.lo == iv.hi == 0 for iv in lam.entries)


def test_jordan_power_doubling(rng):
    for _ in range(8):
        g = random_loxodromic_2x2(rng)
        lam = jordan(g, EPS)
        lam2 = jordan(g * g, EPS)
        for a, b in zip(lam.entries, lam2.entries):
            assert b.overlaps(a.scale(2))


def test_jordan_conjugation_invariance(rng):
    for _ in range(10):
        g = random_loxodromic_2x2(rng)
        h = random_unimodular(rng, 2, rational=True)
        conj = h * g * h.inverse()
        assert conj.char_poly == g.char_poly  # exact invariance
        for a, b in zip(jordan(g, EPS).entries, jordan(conj, EPS).entries):
            assert a.overlaps(b)


# -- loxodromy ---------------------------------------------------------------


def test_is_loxodromic_examples():
    assert is_loxodromic(QMatrix([[2, 1], [1, 1]]))
    assert not is_loxodromic(QMatrix([[0, -1], [1, 0]]))
    assert not is_loxodromic(QMatrix([[1, 1], [0, 1]]))


def test_attracting_repelling_diagonal():
    prox = attracting_repelling(QMatrix.diagonal([2, Fraction(1, 2)]))
    assert prox.attracting == RP1Point.infinity()  # the line through e_1
    assert prox.repelling == RP1Point.affine(0)
    assert prox.certified


def test_attracting_repelling_fibonacci_golden_line():
    prox = attracting_repelling(QMatrix([[2, 1], [1, 1]]))
    phi = QuadVal(Fraction(1, 2), Fraction(1, 2), 5)  # (1 + sqrt 5)/2
    assert prox.attracting == RP1Point.affine(phi)
    assert prox.gap.lo > 0


def test_repelling_is_attracting_of_inverse(rng):
    for _ in range(10):
        g = random_loxodromic_2x2(rng)
        prox = attracting_repelling(g)
        prox_inv = attracting_repelling(g.inverse())
        assert prox.repelling == prox_inv.attracting
        assert prox.attracting == prox_inv.repelling


def test_attracting_fixed_under_powers(rng):
    for _ in range(8):
        g = random_loxodromic_2x2(rng)
        base = attracting_repelling(g).attracting
        for k in (2, 3):
            assert attracting_repelling(g.pow(k)).attracting == base


def test_attracting_repelling_rational_spectrum_d3(rng):
    g = rational_spectrum_loxodromic(rng)
    prox = attracting_repelling(g)
    assert prox.certified
    assert transversal(prox.attracting, prox.repelling)
    assert attracting_repelling(g.inverse()).attracting == prox.repelling
    # the attracting flag is fixed by the action
    from flagdyn.flags import act

    assert act(g, prox.attracting) == prox.attracting


def test_not_loxodromic_raises():
    with pytest.raises(NotLoxodromicError):
        attracting_repelling(QMatrix([[0, -1], [1, 0]]))


# -- contraction -------------------------------------------------------------


def slope_arc(lo: Fraction, hi: Fraction, closed=True) -> SetDescriptor:
    """Arc of lines with slope in [lo, hi] (containing slope 0)."""
    return SetDescriptor.single_arc(
        Arc(RP1Point.from_slope(lo), RP1Point.from_slope(hi), closed, closed)
    )


U_PLUS = slope_arc(Fraction(-1, 10), Fraction(1, 10))
V_MINUS = SetDescriptor.single_arc(
    Arc(RP1Point.from_slope(Fraction(10)), RP1Point.from_slope(Fraction(-10)), True, True)
)


def test_certify_contraction_examples():
    cert4 = certify_contraction(QMatrix.diagonal([4, Fraction(1, 4)]), V_MINUS, U_PLUS, 16)
    assert cert4.n == 2 and cert4.certification == "exact"
    cert2 = certify_contraction(QMatrix.diagonal([2, Fraction(1, 2)]), V_MINUS, U_PLUS, 16)
    assert cert2.n == 4 and cert2.certification == "exact"


def test_contraction_minimality():
    g = QMatrix.diagonal([2, Fraction(1, 2)])
    assert contraction_holds(g.pow(4), V_MINUS, U_PLUS)
    assert not contraction_holds(g.pow(3), V_MINUS, U_PLUS)


def test_contraction_sampled_cross_check(rng):
    # 10^4 sampled points of the complement all land inside at N = 4
    g4 = QMatrix.diagonal([2, Fraction(1, 2)]).pow(4)
    comp = V_MINUS.complement()
    checked = 0
    while checked < 10**4:
        s = Fraction(rng.randint(-4000, 4000), rng.randint(1, 400))
        pt = RP1Point.from_slope(s)
        if not comp.contains_point(pt):
            continue
        checked += 1
        assert U_PLUS.contains_point(pt.apply(g4))


def test_contraction_rejects_rotation():
    with pytest.raises(NotLoxodromicError):
        certify_contraction(QMatrix([[0, -1], [1, 0]]), V_MINUS, U_PLUS, 8)


def test_contraction_misaligned_fixed_points():
    # attracting point of diag(2, 1/2) is the slope-0 line, not in V-
    with pytest.raises(MisalignedFixedPointsError):
        certify_contraction(QMatrix.diagonal([2, Fraction(1, 2)]), U_PLUS, V_MINUS, 8)


def test_contraction_exceeds_cap():
    with pytest.raises(ExceededNMaxError):
        certify_contraction(QMatrix.diagonal([2, Fraction(1, 2)]), V_MINUS, U_PLUS, 3)


def test_dynamical_decay_d3(rng):
    # iterates of a random transversal flag approach the attracting flag
    g = QMatrix.diagonal([4, 1, Fraction(1, 4)])
    prox = attracting_repelling(g)
    moved = 0
    while moved < 3:
        x = canonicalize(random_unimodular(rng, 3, steps=10, rational=True))
        if not transversal(x, prox.repelling) or x == prox.attracting:
            continue
        moved += 1
        dists = []
        cur = x
        for _ in range(26):
            cur = canonicalize(g * cur.basis)
            dists.append(flag_distance(cur, prox.attracting))
        assert dists[-1].hi < Fraction(1, 10**6)
        # eventually monotone: the tail decreases
        tail = dists[-6:]
        assert all(a.hi > b.lo for a, b in zip(tail, tail[1:]))


# -- theta estimation and search ----------------------------------------------


def test_theta_estimate_trivial_group():
    trivial = GroupPresentation(dim=2, generators=())
    est = theta_estimate(trivial, 3)
    assert all(iv.lo == iv.hi == 0 for iv in est.suprema)
    assert est.flagged == frozenset()


def test_theta_estimate_diagonal_group():
    grp = GroupPresentation(dim=2, generators=(("a", QMatrix.diagonal([2, Fraction(1, 2)])),))
    est = theta_estimate(grp, 3)
    # kappa(a^3) = (3 ln 2, -3 ln 2), so the root value is 6 ln 2
    assert encloses(est.suprema[0], 6 * mpmath.log(2))
    assert est.flagged == frozenset({1})


def test_theta_estimate_sanov():
    est = theta_estimate(sanov_group(), 4)
    assert est.flagged == frozenset({1})
    assert est.suprema[0].lo > Fraction(7, 10)  # above ln 2


def test_theta_monotone_in_radius():
    grp = sanov_group()
    small = theta_estimate(grp, 2)
    big = theta_estimate(grp, 3)
    assert big.suprema[0].hi >= small.suprema[0].lo


def test_find_loxodromic_sanov():
    word, prox = find_loxodromic(sanov_group(), 8)
    assert word == "ab"
    assert prox.g == QMatrix([[5, 2], [2, 1]])
    assert prox.g.trace() == 6


def test_find_loxodromic_failures():
    unipotent = GroupPresentation(dim=2, generators=(("a", QMatrix([[1, 1], [0, 1]])),))
    with pytest.raises(NoLoxodromicError):
        find_loxodromic(unipotent, 4)
    rotation = GroupPresentation(dim=2, generators=(("a", QMatrix([[0, -1], [1, 0]])),))
    with pytest.raises(NoLoxodromicError):
        find_loxodromic(rotation, 6)
