import random
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from flagdyn.qlinalg import QMatrix  # noqa: E402

mpmath.mp.dps = 60


def random_unimodular(rng: random.Random, d: int, steps: int = 8, bound: int = 3, rational: bool = False) -> QMatrix:
    """Random determinant-one matrix: a product of elementary shears.

    With rational=True the shear coefficients pick up denominators, which
    exercises nontrivial p-adic valuations.
    """
    m = QMatrix.identity(d)
    for _ in range(steps):
        i, j = rng.randrange(d), rng.randrange(d)
        if i == j:
            continue
        num = rng.randint(-bound, bound)
        den = rng.randint(1, 3) if rational else 1
        if num == 0:
            continue
        e = [[Fraction(int(r == c)) for c in range(d)] for r in range(d)]
        e[i][j] = Fraction(num, den)
        m = m * QMatrix(e)
    return m


def mp_of(frac: Fraction) -> mpmath.mpf:
    return mpmath.mpf(frac.numerator) / frac.denominator


def encloses(interval, value) -> bool:
    """Does the exact interval contain the high-precision reference value?"""
    return mp_of(interval.lo) <= value <= mp_of(interval.hi)


@pytest.fixture
def rng():
    return random.Random(20240817)
