import random
from fractions import Fraction

import pytest

from flagdyn.errors import NonSquareError, SingularMatrixError
from flagdyn.qlinalg import QMatrix, parse_rat, rank, rat_str

from conftest import random_unimodular


def charpoly_by_cofactors(m: QMatrix) -> tuple[Fraction, ...]:
    """Independent oracle: expand det(tI - M) over the polynomial ring.

    Polynomials are coefficient lists (lowest degree first) and the
    determinant is computed by recursive cofactor expansion.
    """

    def pmul(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            for j, b in enumerate(q):
                out[i + j] += a * b
        return out

    def padd(p, q):
        n = max(len(p), len(q))
        return [
            (p[i] if i < len(p) else Fraction(0)) + (q[i] if i < len(q) else Fraction(0))
            for i in range(n)
        ]

    def pdet(rows):
        n = len(rows)
        if n == 1:
            return rows[0][0]
        acc = [Fraction(0)]
        for j in range(n):
            minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
            term = pmul(rows[0][j], pdet(minor))
            if j % 2:
                term = [-c for c in term]
            acc = padd(acc, term)
        return acc

    n = m.dim
    entries = [
        [([-m[i, j], Fraction(1)] if i == j else [-m[i, j]]) for j in range(n)]
        for i in range(n)
    ]
    low_first = pdet(entries)
    return tuple(reversed(low_first))


def test_charpoly_identity_2x2():
    assert QMatrix.identity(2).char_poly == (1, -2, 1)


def test_charpoly_fibonacci_matrix_vs_cofactor_oracle():
    m = QMatrix([[2, 1], [1, 1]])
    assert m.char_poly == charpoly_by_cofactors(m)
    assert m.char_poly == (1, -3, 1)


def test_charpoly_unipotent():
    assert QMatrix([[1, 2], [0, 1]]).char_poly == (1, -2, 1)


def test_charpoly_matches_cofactor_oracle_random(rng):
    for d in (2, 3, 4):
        for _ in range(25):
            m = random_unimodular(rng, d, rational=True)
            assert m.char_poly == charpoly_by_cofactors(m)


def test_charpoly_conjugation_invariance(rng):
    count = 0
    while count < 100:
        d = rng.choice((2, 3))
        g = random_unimodular(rng, d)
        h = random_unimodular(rng, d, rational=True)
        assert (g * h * g.inverse()).char_poly == h.char_poly
        count += 1


def test_charpoly_reversal_law(rng):
    # monic normalization of t^d p(1/t) equals char_poly(M^-1) for det 1
    count = 0
    while count < 100:
        d = rng.choice((2, 3))
        m = random_unimodular(rng, d, rational=True)
        p = m.char_poly
        reversed_coeffs = tuple(reversed(p))  # coefficients of t^d p(1/t)
        lead = reversed_coeffs[0]
        assert lead != 0
        monic = tuple(c / lead for c in reversed_coeffs)
        assert monic == m.inverse().char_poly
        count += 1


def test_determinant_from_charpoly(rng):
    # det(tI - M) at t = 0 is (-1)^d det(M)
    for d in (2, 3):
        for _ in range(10):
            m = random_unimodular(rng, d, rational=True)
            scaled = m.scale(Fraction(rng.randint(1, 3), rng.randint(1, 2)))
            assert scaled.det == (-1) ** d * scaled.char_poly[-1]
    assert random_unimodular(random.Random(5), 3).det == 1


def test_inverse_and_pow():
    m = QMatrix([[1, 2], [0, 1]])
    assert (m * m.inverse()).is_identity()
    assert m.pow(3) == QMatrix([[1, 6], [0, 1]])
    assert m.pow(-2) == QMatrix([[1, -4], [0, 1]])
    assert m.pow(0).is_identity()


def test_singular_inverse_raises():
    with pytest.raises(SingularMatrixError):
        QMatrix([[1, 1], [1, 1]]).inverse()


def test_non_square_rejected():
    with pytest.raises(NonSquareError):
        QMatrix([[1, 2, 3], [4, 5, 6]])


def test_content_key_identifies_equal_matrices():
    a = QMatrix([[Fraction(1, 2), 0], [0, 2]])
    b = QMatrix([[Fraction(2, 4), 0], [0, Fraction(4, 2)]])
    assert a.content_key() == b.content_key()
    assert hash(a) == hash(b)
    assert a == b


def test_rational_string_format():
    assert rat_str(Fraction(3)) == "3"
    assert rat_str(Fraction(-7, 2)) == "-7/2"
    assert parse_rat("3") == 3
    assert parse_rat("-7/2") == Fraction(-7, 2)


def test_matrix_json_round_trip():
    m = QMatrix([[Fraction(1, 3), 2], [0, 3]])
    assert QMatrix.from_json(m.to_json()) == m
    assert m.to_json() == [["1/3", "2"], ["0", "3"]]


def test_rank():
    assert rank([[1, 0], [0, 1]]) == 2
    assert rank([[1, 1], [2, 2]]) == 1
    assert rank([]) == 0
    assert rank([[Fraction(1, 2), 1], [1, 2], [0, 1]]) == 2
