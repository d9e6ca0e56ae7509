import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagdyn.errors import DuplicatePointsError, EmptyListError, InputError
from flagdyn.flags import act, canonicalize, transversal
from flagdyn.position import (
    Configuration,
    NoetherianParams,
    conservative_group_constant,
    empty_intersection_bound,
    general_position_check,
    group_bound,
    noetherian_bound,
)
from flagdyn.qlinalg import QMatrix

from conftest import random_unimodular


def monomial_count_oracle(proj_dim: int, max_deg: int) -> int:
    """Brute-force enumeration of monomials of degree <= D in d+1 variables."""
    nvars = proj_dim + 1
    count = 0
    for deg in range(max_deg + 1):
        count += sum(
            1
            for combo in itertools.combinations_with_replacement(range(nvars), deg)
        )
    return count + 1


def test_noetherian_examples():
    assert noetherian_bound(NoetherianParams(1, 1)) == 4
    assert noetherian_bound(NoetherianParams(3, 2)) == 16
    assert noetherian_bound(NoetherianParams(5, 0)) == 2


def test_noetherian_matches_monomial_oracle():
    for d in range(1, 7):
        for deg in range(0, 5):
            assert noetherian_bound(NoetherianParams(d, deg)) == monomial_count_oracle(d, deg)


def test_noetherian_monotone():
    # strictly increasing in the degree bound, weakly in the dimension
    # (degree 0 leaves only the constants regardless of the dimension)
    for d in range(1, 6):
        for deg in range(0, 4):
            k = noetherian_bound(NoetherianParams(d, deg))
            assert noetherian_bound(NoetherianParams(d + 1, deg)) >= k
            assert noetherian_bound(NoetherianParams(d, deg + 1)) > k
            if deg >= 1:
                assert noetherian_bound(NoetherianParams(d + 1, deg)) > k


def test_invalid_params():
    with pytest.raises(InputError):
        NoetherianParams(0, 1)
    with pytest.raises(InputError):
        NoetherianParams(1, -1)


def test_group_bound_examples():
    assert group_bound([4]) == 4
    assert group_bound([4, 16]) == 32
    assert group_bound([4, 4, 4]) == 12
    with pytest.raises(EmptyListError):
        group_bound([])


@given(st.lists(st.integers(min_value=1, max_value=1000), min_size=1, max_size=8))
@settings(max_examples=60)
def test_group_bound_dominates_max(ks):
    b = group_bound(ks)
    assert b == len(ks) * max(ks)
    assert b >= max(ks)
    assert (b == max(ks)) == (len(ks) == 1)


def test_conservative_constant():
    assert conservative_group_constant(2) == 1
    # d = 3: ambient projective dimension C(3,1) C(3,2) - 1 = 8, degree 3
    assert conservative_group_constant(3) == noetherian_bound(NoetherianParams(8, 3))


def line(xi) -> "Flag":
    """The flag of the line through (xi, 1), completed to a basis."""
    return canonicalize(QMatrix([[Fraction(xi), 1], [1, 0]]))


def test_general_position_d2_examples():
    # the lines through (1,0), (0,1) and (1,1): pairwise distinct, so in
    # general position on the projective line
    p10 = canonicalize(QMatrix([[1, 0], [0, 1]]))
    p01 = canonicalize(QMatrix([[0, 1], [1, 0]]))
    p11 = canonicalize(QMatrix([[1, 0], [1, 1]]))
    config = Configuration(points=(p10, p01, p11), dim=2)
    verdict = general_position_check(config, mode="exact-d2")
    assert verdict.kind == "certified-true"
    with pytest.raises(DuplicatePointsError):
        Configuration(points=(line(0), line(1), line(0)), dim=2)


def test_general_position_d2_matches_distinctness_oracle(rng):
    # random families of <= 8 projective points: the checker must agree
    # with the pairwise-distinctness oracle in every case
    agree = 0
    for _ in range(100):
        k = rng.randint(1, 8)
        raw = [line(Fraction(rng.randint(-6, 6), rng.randint(1, 3))) for _ in range(k)]
        distinct = len(set(raw)) == len(raw)
        if distinct:
            config = Configuration(points=tuple(raw), dim=2)
            assert general_position_check(config, mode="exact-d2").kind == "certified-true"
        else:
            with pytest.raises(DuplicatePointsError):
                Configuration(points=tuple(raw), dim=2)
        agree += 1
    assert agree == 100


def test_general_position_d3_two_flags_with_witness(rng):
    x = canonicalize(random_unimodular(rng, 3, rational=True))
    y = canonicalize(random_unimodular(rng, 3, rational=True))
    assert transversal(x, y)
    config = Configuration(points=(x, y), dim=3)
    verdict = general_position_check(config, mode="monte-carlo", seed=7)
    assert verdict.kind == "probable-true"
    assert verdict.holds
    # explicit separating witness for E_0 = {x}, x' = y: z in Y_x \ Y_y
    z = verdict.separating_witnesses[((0,), 1)]
    assert not transversal(z, x)
    assert transversal(z, y)


def test_general_position_equivariance(rng):
    pts = tuple(canonicalize(random_unimodular(rng, 3, rational=True)) for _ in range(3))
    config = Configuration(points=pts, dim=3)
    before = general_position_check(config, mode="monte-carlo", seed=3)
    g = random_unimodular(rng, 3)
    moved = Configuration(points=tuple(act(g, p) for p in pts), dim=3)
    after = general_position_check(moved, mode="monte-carlo", seed=3)
    assert before.kind == after.kind == "probable-true"
    assert before.holds == after.holds


def test_exact_mode_rejects_higher_rank(rng):
    config = Configuration(points=(canonicalize(random_unimodular(rng, 3)),), dim=3)
    with pytest.raises(InputError):
        general_position_check(config, mode="exact-d2")


def test_empty_intersection_bound_d2():
    pts = tuple(line(i) for i in range(5))
    config = Configuration(points=pts, dim=2)
    claim = empty_intersection_bound(config, 1)
    assert claim.verified_exactly and claim.k == 1 and claim.n_points == 5
    solo = Configuration(points=(line(0),), dim=2)
    assert empty_intersection_bound(solo, 3).verified_exactly


def generic_flag(rng, d, bound=10):
    """Random flag from a dense integer matrix; subspace coincidences are
    non-generic and effectively never occur."""
    while True:
        m = QMatrix([[Fraction(rng.randint(-bound, bound)) for _ in range(d)] for _ in range(d)])
        if m.det != 0:
            return canonicalize(m)


def test_empty_intersection_bound_d3_spot_check(rng):
    pts = []
    while len(pts) < 20:
        f = generic_flag(rng, 3)
        if f not in pts:
            pts.append(f)
    config = Configuration(points=tuple(pts), dim=3)
    claim = empty_intersection_bound(config, 16, seed=5, samples=10**4)
    assert not claim.verified_exactly
    assert claim.spot_check["samples"] == 10**4
    assert claim.spot_check["max_depth_seen"] <= 16


def test_degenerate_family_is_flagged_suspicious(rng):
    # four flags sharing the same V_1 line genuinely violate general
    # position (the common locus of two of them is trapped in the third's
    # locus); the checker must not report a clean probabilistic pass
    shared = [Fraction(1), Fraction(0), Fraction(0)]
    pts = []
    while len(pts) < 4:
        cols = [shared] + [[Fraction(rng.randint(-6, 6)) for _ in range(3)] for _ in range(2)]
        m = QMatrix.from_columns(cols)
        if m.det != 0:
            f = canonicalize(m)
            if f not in pts:
                pts.append(f)
    config = Configuration(points=tuple(pts), dim=3)
    verdict = general_position_check(config, mode="monte-carlo", seed=11)
    assert verdict.suspicious_conditions
    assert not verdict.holds
