"""p-adic valuations of elementary divisors.

For an invertible rational matrix M and a prime p, the elementary divisors
of M over the localization of Z at p are powers of p; their exponents are
computed by Gaussian elimination with minimal-valuation pivoting.  All row
and column operations used multiply M by matrices that are invertible over
the localization, so the pivot valuations are invariants of M.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError, SingularMatrixError
from .qlinalg import QMatrix

_INF = float("inf")


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x: Fraction, p: int):
    """p-adic valuation of a rational; +inf for zero."""
    if x == 0:
        return _INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ValuationVector:
    """Valuations of the elementary divisors at p, weakly increasing."""

    prime: int
    vals: tuple[int, ...]

    def __post_init__(self):
        if any(a > b for a, b in zip(self.vals, self.vals[1:])):
            raise ValueError("valuations must be weakly increasing")

    def reversed_negated(self) -> "ValuationVector":
        return ValuationVector(self.prime, tuple(-v for v in reversed(self.vals)))

    def to_json(self):
        return {"prime": self.prime, "vals": list(self.vals)}


def smith_valuations(m: QMatrix, p: int) -> ValuationVector:
    """Elementary-divisor valuations of an invertible matrix at a prime p.

    Pivoting on an entry of minimal valuation keeps every elimination
    multiplier p-integral, so after clearing a cross the remaining block
    has valuations >= the pivot's and the pivot sequence comes out weakly
    increasing.
    """
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    n = m.dim
    a = [list(row) for row in m.rows]
    vals = []
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                if a[i][j] == 0:
                    continue
                v = vp(a[i][j], p)
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            raise SingularMatrixError("matrix is singular")
        v, bi, bj = best
        a[k], a[bi] = a[bi], a[k]
        for row in a:
            row[k], row[bj] = row[bj], row[k]
        piv = a[k][k]
        for i in range(k + 1, n):
            if a[i][k] != 0:
                f = a[i][k] / piv
                a[i] = [e - f * q for e, q in zip(a[i], a[k])]
        for j in range(k + 1, n):
            if a[k][j] != 0:
                g = a[k][j] / piv
                for i in range(k, n):
                    a[i][j] -= g * a[i][k]
        vals.append(v)
    return ValuationVector(p, tuple(vals))
