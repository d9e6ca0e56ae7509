import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagdyn.errors import (
    ExhaustedTriesError,
    InputError,
    MalformedWitnessError,
    MixedKindsError,
    NoLoxodromicError,
    ZeroSeparationError,
)
from flagdyn.qlinalg import QMatrix
from flagdyn.rp1 import Arc, RP1Point, arc_contained, strictly_between
from flagdyn.witness import (
    Ball,
    PhpInstance,
    PhpWitness,
    SetDescriptor,
    build_neighborhoods,
    choose_n,
    construct_witness,
    max_multiplicity,
    multiplicity_bound_ok,
    pullback_hat,
    search_generic_tuple,
    verify_witness,
)
from flagdyn.words import GroupPresentation, enumerate_ball, sanov_group

from test_rp1 import chart_arc, chart_point

F_WORDS = ("a", "b", "A", "B")


def sanov_instance(eps=Fraction(1)) -> PhpInstance:
    return PhpInstance(sanov_group(), F_WORDS, eps)


# -- choose_n ------------------------------------------------------------------


def test_choose_n_examples():
    assert choose_n(Fraction(1), 1) == 5
    assert choose_n(Fraction(3), 1) == 1
    assert choose_n(Fraction(1, 2), 2) == 65


@given(
    st.fractions(min_value=Fraction(1, 50), max_value=Fraction(50)),
    st.integers(min_value=1, max_value=40),
)
@settings(max_examples=80)
def test_choose_n_minimality_exact(eps, k):
    n = choose_n(eps, k)
    assert eps * eps * n > 4 * k * k  # strict
    assert eps * eps * (n - 1) <= 4 * k * k  # predecessor fails


def test_multiplicity_bound_exact_comparison():
    # m < eps sqrt(n) by exact squaring
    assert multiplicity_bound_ok(2, Fraction(1), 5)  # 4 < 5
    assert not multiplicity_bound_ok(3, Fraction(1), 9)  # 9 < 9 fails (strict)
    assert multiplicity_bound_ok(0, Fraction(1, 10), 1)


# -- set descriptors ---------------------------------------------------------------


def test_descriptor_rejects_overlapping_arcs():
    with pytest.raises(InputError):
        SetDescriptor.arc_union([chart_arc(Fraction(0), Fraction(3, 10)), chart_arc(Fraction(2, 10), Fraction(5, 10))])


def test_descriptor_canonical_order():
    a = chart_arc(Fraction(6, 10), Fraction(7, 10))
    b = chart_arc(Fraction(1, 10), Fraction(2, 10))
    desc = SetDescriptor.arc_union([a, b])
    assert desc.arcs == (b, a)
    assert desc == SetDescriptor.arc_union([b, a])


def test_descriptor_complement_roundtrip():
    desc = SetDescriptor.arc_union(
        [chart_arc(Fraction(1, 10), Fraction(2, 10)), chart_arc(Fraction(5, 10), Fraction(7, 10))]
    )
    comp = desc.complement()
    assert len(comp.arcs) == 2
    probe_inside = chart_point(Fraction(15, 100))
    probe_outside = chart_point(Fraction(3, 10))
    assert desc.contains_point(probe_inside) and not comp.contains_point(probe_inside)
    assert comp.contains_point(probe_outside) and not desc.contains_point(probe_outside)
    assert comp.complement() == desc
    assert SetDescriptor.empty().complement().kind == "full"
    assert SetDescriptor.full_space().complement().is_empty


def test_descriptor_image_and_containment():
    desc = SetDescriptor.single_arc(Arc(RP1Point.affine(4), RP1Point.affine(1)))
    g = QMatrix.diagonal([2, Fraction(1, 2)])
    img = desc.image(g)
    assert img.arcs[0].start == RP1Point.affine(16)
    big = SetDescriptor.single_arc(Arc(RP1Point.affine(20), RP1Point.affine(2)))
    assert big.contains_descriptor(img)
    assert not img.contains_descriptor(big)
    assert SetDescriptor.full_space().contains_descriptor(big)


# -- covering multiplicity ------------------------------------------------------------


def brute_force_multiplicity(sets):
    """Oracle: evaluate membership on every atom of the full arrangement."""
    from flagdyn.rp1 import circle_atoms

    pts = [p for s in sets for a in s.arcs for p in a.endpoints()]
    best, witness = 0, None
    for atom in circle_atoms(pts):
        cnt = sum(1 for s in sets if s.contains_point(atom))
        if cnt > best:
            best, witness = cnt, atom
    return best, witness


def test_multiplicity_chart_example():
    sets = [
        SetDescriptor.single_arc(chart_arc(Fraction(0), Fraction(3, 10))),
        SetDescriptor.single_arc(chart_arc(Fraction(2, 10), Fraction(5, 10))),
        SetDescriptor.single_arc(chart_arc(Fraction(4, 10), Fraction(7, 10))),
    ]
    res = max_multiplicity(sets)
    assert res.m == 2 and res.certification == "exact"
    assert sum(1 for s in sets if s.contains_point(res.witness)) == 2


def test_multiplicity_disjoint_and_nested():
    disjoint = [
        SetDescriptor.single_arc(chart_arc(Fraction(0), Fraction(1, 10))),
        SetDescriptor.single_arc(chart_arc(Fraction(2, 10), Fraction(3, 10))),
    ]
    assert max_multiplicity(disjoint).m == 1
    nested = [
        SetDescriptor.single_arc(chart_arc(Fraction(k, 20), Fraction(20 - k, 20)))
        for k in range(1, 6)
    ]
    assert max_multiplicity(nested).m == 5
    assert max_multiplicity([]).m == 0


def random_arc_family(rng, max_arcs=8):
    sets = []
    for _ in range(rng.randint(1, max_arcs)):
        c1 = Fraction(rng.randint(0, 239), 240)
        c2 = Fraction(rng.randint(0, 239), 240)
        if chart_point(c1) == chart_point(c2):
            continue
        closed = rng.random() < 0.5
        sets.append(SetDescriptor.single_arc(Arc(chart_point(c1), chart_point(c2), closed, closed)))
    return sets


def test_multiplicity_sweep_matches_brute_force(rng):
    for _ in range(60):
        sets = random_arc_family(rng)
        if not sets:
            continue
        res = max_multiplicity(sets)
        oracle_m, _ = brute_force_multiplicity(sets)
        assert res.m == oracle_m


def test_multiplicity_mixed_kinds_rejected():
    from flagdyn.flags import standard_flag

    arcs = SetDescriptor.single_arc(chart_arc(Fraction(0), Fraction(1, 10)))
    balls = SetDescriptor.ball_union([Ball(standard_flag(3), Fraction(1, 8))])
    with pytest.raises(MixedKindsError):
        max_multiplicity([arcs, balls])


# -- generic tuples ------------------------------------------------------------------


def test_search_generic_tuple_empty():
    inst = sanov_instance()
    assert search_generic_tuple(inst.group, F_WORDS, RP1Point.affine(1), RP1Point.affine(-1), 0) == []


def test_search_generic_tuple_trivial_group_exhausts():
    # every s_i is forced to be the identity, so translates collide
    trivial = GroupPresentation(dim=2, generators=())
    with pytest.raises(ExhaustedTriesError):
        search_generic_tuple(trivial, ("",), RP1Point.affine(1), RP1Point.affine(-1), 2, max_tries=10)


def test_search_generic_tuple_sanov_exact_postcheck():
    from flagdyn.dynamics import find_loxodromic

    group = sanov_group()
    _w, prox = find_loxodromic(group, 4)
    words = search_generic_tuple(group, F_WORDS, prox.attracting, prox.repelling, 5, seed=42)
    assert len(words) == 5
    # recheck distinctness of all translates exactly
    f_mats = [group.word_matrix(w) for w in ("",) + F_WORDS]
    pts = []
    for w in words:
        smat = group.word_matrix(w)
        for base in (prox.attracting, prox.repelling):
            moved = base.apply(smat)
            pts.extend(moved.apply(am) for am in f_mats)
    assert len(pts) == 50
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert pts[i] != pts[j]


# -- neighborhoods ---------------------------------------------------------------------


def test_build_neighborhoods_two_points():
    pts = [RP1Point.infinity(), RP1Point.affine(0)]
    fam = build_neighborhoods(pts, [QMatrix.identity(2)], Fraction(1, 2))
    assert len(fam.inner) == len(fam.outer) == 2
    for u, v, x in zip(fam.inner, fam.outer, pts):
        assert u.contains_interior_point(x) and v.contains_interior_point(x)
        assert v.contains_descriptor(u)
    assert fam.outer[0].intersects(fam.outer[1]) is None


def test_build_neighborhoods_duplicate_rejected():
    pts = [RP1Point.affine(1), RP1Point.affine(1)]
    with pytest.raises(ZeroSeparationError):
        build_neighborhoods(pts, [QMatrix.identity(2)], Fraction(1, 2))


def test_build_neighborhoods_sanov_pipeline_disjointness():
    from flagdyn.dynamics import find_loxodromic
    from flagdyn.witness import _act_point

    group = sanov_group()
    _w, prox = find_loxodromic(group, 4)
    words = search_generic_tuple(group, F_WORDS, prox.attracting, prox.repelling, 5, seed=7)
    s_mats = [group.word_matrix(w) for w in words]
    points = []
    for sm in s_mats:
        points.append(prox.attracting.apply(sm))
        points.append(prox.repelling.apply(sm))
    f_mats = [group.word_matrix(w) for w in ("",) + F_WORDS]
    fam = build_neighborhoods(points, f_mats, Fraction(1, 2))
    translated = [u.image(am) for u in fam.inner for am in f_mats]
    assert len(translated) == 50
    for i in range(len(translated)):
        for j in range(i + 1, len(translated)):
            assert translated[i].intersects(translated[j]) is None


# -- construction and verification --------------------------------------------------------


def test_construct_witness_sanov():
    witness = construct_witness(sanov_instance(), seed=42)
    assert witness.n == 5
    assert witness.provenance["K"] == 1
    report = verify_witness(witness)
    assert report.passed and report.certification == "exact"
    assert multiplicity_bound_ok(report.condition2.multiplicity, Fraction(1), 5)


def test_construct_witness_degenerate_single_pair():
    witness = construct_witness(sanov_instance(Fraction(3)), seed=3)
    assert witness.n == 1
    assert verify_witness(witness).passed


def test_construct_witness_no_loxodromic():
    rotation = GroupPresentation(dim=2, generators=(("a", QMatrix([[0, -1], [1, 0]])),))
    with pytest.raises(NoLoxodromicError):
        construct_witness(PhpInstance(rotation, ("a",), Fraction(1)), seed=0)


def test_witness_gamma_words_match_matrices():
    witness = construct_witness(sanov_instance(), seed=5)
    for word, mat in witness.gammas:
        assert witness.group.word_matrix(word) == mat


def test_soundness_over_seeds():
    for seed in range(6):
        witness = construct_witness(sanov_instance(), seed=seed)
        assert verify_witness(witness).passed


# -- tampering -----------------------------------------------------------------------


def tamper_enlarge_c(witness: PhpWitness, cover_index=1) -> PhpWitness:
    """Enlarge C_0 into an arc that swallows C_1 (and keep D_0 = old D_0)."""
    c0 = witness.c_sets[0].arcs[0]
    c1 = witness.c_sets[cover_index].arcs[0]
    big = Arc(c0.start, c1.end, c0.closed_start, c1.closed_end)
    new_c = (SetDescriptor.single_arc(big),) + witness.c_sets[1:]
    # keep the witness structurally valid: D_0 must still contain C_0
    new_d = (SetDescriptor.full_space(),) + witness.d_sets[1:]
    return PhpWitness(
        group=witness.group,
        f_words=witness.f_words,
        epsilon=witness.epsilon,
        n=witness.n,
        gammas=witness.gammas,
        c_sets=new_c,
        d_sets=new_d,
        provenance={},
    )


def test_tampered_overlap_fails_condition1():
    witness = construct_witness(sanov_instance(), seed=42)
    bad = tamper_enlarge_c(witness)
    report = verify_witness(bad)
    assert not report.condition1.passed
    assert report.condition1.overlap is not None


def test_duplicated_index_fails_condition1():
    witness = construct_witness(sanov_instance(), seed=42)
    gammas = (witness.gammas[0],) + witness.gammas[1:]
    dup = PhpWitness(
        group=witness.group,
        f_words=witness.f_words,
        epsilon=witness.epsilon,
        n=witness.n,
        gammas=(witness.gammas[0], witness.gammas[0]) + witness.gammas[2:],
        c_sets=(witness.c_sets[0], witness.c_sets[0]) + witness.c_sets[2:],
        d_sets=(witness.d_sets[0], witness.d_sets[0]) + witness.d_sets[2:],
        provenance={},
    )
    report = verify_witness(dup)
    assert not report.condition1.passed


def test_malformed_witness_c_not_inside_d():
    witness = construct_witness(sanov_instance(), seed=42)
    with pytest.raises(MalformedWitnessError):
        PhpWitness(
            group=witness.group,
            f_words=witness.f_words,
            epsilon=witness.epsilon,
            n=witness.n,
            gammas=witness.gammas,
            c_sets=witness.d_sets,  # outer arcs as C
            d_sets=witness.c_sets,  # inner arcs as D: C inside D violated
            provenance={},
        )


def test_witness_rejects_inconsistent_recorded_k():
    witness = construct_witness(sanov_instance(), seed=42)
    with pytest.raises(MalformedWitnessError):
        PhpWitness(
            group=witness.group,
            f_words=witness.f_words,
            epsilon=witness.epsilon,
            n=witness.n,
            gammas=witness.gammas,
            c_sets=witness.c_sets,
            d_sets=witness.d_sets,
            provenance={"K": 50},  # eps sqrt(5) is far below 2 * 50
        )


def test_enlarging_d_never_fixes_condition1_failure():
    witness = construct_witness(sanov_instance(), seed=42)
    bad = tamper_enlarge_c(witness)
    assert not verify_witness(bad).condition1.passed
    # enlarge every other D to the whole space: the C-C overlap remains
    wider = PhpWitness(
        group=bad.group,
        f_words=bad.f_words,
        epsilon=bad.epsilon,
        n=bad.n,
        gammas=bad.gammas,
        c_sets=bad.c_sets,
        d_sets=tuple(SetDescriptor.full_space() for _ in bad.d_sets),
        provenance={},
    )
    assert not verify_witness(wider).condition1.passed


def test_enlarging_d_only_preserves_or_breaks_condition2():
    witness = construct_witness(sanov_instance(), seed=42)
    base = verify_witness(witness).condition2.multiplicity
    gammas = witness.gammas
    # replace D_0 by a much larger arc (still containing C_0)
    big_d = SetDescriptor.single_arc(
        Arc(witness.d_sets[1].arcs[0].start, witness.d_sets[0].arcs[0].end)
    )
    wider = PhpWitness(
        group=witness.group,
        f_words=witness.f_words,
        epsilon=witness.epsilon,
        n=witness.n,
        gammas=gammas,
        c_sets=witness.c_sets,
        d_sets=(big_d,) + witness.d_sets[1:],
        provenance={},
    )
    try:
        rep = verify_witness(wider)
    except MalformedWitnessError:
        return  # enlargement swallowed C_0's complement; nothing to assert
    assert rep.condition2.multiplicity >= base


# -- hat transport -----------------------------------------------------------------------


def test_pullback_hat_extremes():
    ball = enumerate_ball(sanov_group(), 2)
    base = RP1Point.affine(Fraction(1, 3))
    assert pullback_hat(SetDescriptor.full_space(), base, ball) == [w for w, _ in ball]
    assert pullback_hat(SetDescriptor.empty(), base, ball) == []
    arc = SetDescriptor.single_arc(Arc(RP1Point.affine(1), RP1Point.affine(0), True, True))
    hats = pullback_hat(arc, base, ball)
    assert "" in hats  # the identity fixes the basepoint, which is inside


def test_hat_transport_disjointness(rng):
    # pairwise disjoint targets pull back to pairwise disjoint word sets
    witness = construct_witness(sanov_instance(), seed=2)
    ball = enumerate_ball(sanov_group(), 4)
    base = RP1Point.affine(Fraction(2, 7))
    hats = [set(pullback_hat(c, base, ball)) for c in witness.c_sets]
    for i in range(len(hats)):
        for j in range(i + 1, len(hats)):
            assert not (hats[i] & hats[j])


def test_hat_transport_multiplicity(rng):
    witness = construct_witness(sanov_instance(), seed=2)
    report = verify_witness(witness)
    m = report.condition2.multiplicity
    ball = enumerate_ball(sanov_group(), 4)
    base = RP1Point.affine(Fraction(2, 7))
    cond2_sets = list(witness.d_sets) + [
        witness.c_sets[i].complement().image(witness.gammas[i][1].inverse())
        for i in range(witness.n)
    ]
    hats = [set(pullback_hat(s, base, ball)) for s in cond2_sets]
    for word, _mat in ball:
        assert sum(1 for h in hats if word in h) <= m
