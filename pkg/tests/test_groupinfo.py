from fractions import Fraction

import pytest

from flagdyn.errors import InputError
from flagdyn.groupinfo import density_evidence, padic_boundedness
from flagdyn.qlinalg import QMatrix
from flagdyn.words import GroupPresentation, sanov_group


def diagonal_group():
    return GroupPresentation(dim=2, generators=(("a", QMatrix.diagonal([2, Fraction(1, 2)])),))


def trivial_group():
    return GroupPresentation(dim=2, generators=())


def test_density_sanov():
    ev = density_evidence(sanov_group(), 3)
    assert ev.span_dim == 4
    assert ev.burnside_full
    assert ev.loxodromic_found
    assert ev.infinite
    assert "not decidable" in ev.disclaimer


def test_density_diagonal_group():
    ev = density_evidence(diagonal_group(), 3)
    assert ev.span_dim == 2
    assert not ev.burnside_full
    assert ev.loxodromic_found  # diag(2, 1/2) is loxodromic


def test_density_trivial_group():
    ev = density_evidence(trivial_group(), 2)
    assert ev.span_dim == 1
    assert not ev.burnside_full and not ev.loxodromic_found and not ev.infinite


def test_density_span_monotone_in_radius():
    prev = 0
    for radius in (1, 2, 3):
        ev = density_evidence(sanov_group(), radius)
        assert ev.span_dim >= prev
        assert ev.span_dim <= 4
        prev = ev.span_dim


def test_padic_integral_group_flat():
    s = QMatrix([[0, -1], [1, 0]])
    t = QMatrix([[1, 1], [0, 1]])
    grp = GroupPresentation(dim=2, generators=(("s", s), ("t", t)))
    rep = padic_boundedness(grp, 3, 4)
    assert rep.max_abs <= 1
    assert rep.trend == "flat"


def test_padic_diagonal_growth():
    rep = padic_boundedness(diagonal_group(), 2, 3)
    assert rep.max_abs == 8  # |2^-3|_2
    assert rep.trend == "growing"


def test_padic_trivial_group():
    rep = padic_boundedness(trivial_group(), 5, 2)
    assert rep.max_abs == 1
    assert rep.trend == "flat"


def test_padic_validates_prime():
    with pytest.raises(InputError):
        padic_boundedness(sanov_group(), 6, 2)


def test_density_validates_radius():
    with pytest.raises(InputError):
        density_evidence(sanov_group(), 0)
