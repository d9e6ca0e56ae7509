"""Exact linear algebra over the rationals.

Matrices are immutable values with ``fractions.Fraction`` entries, so all
arithmetic here is exact: no rounding enters determinants, inverses or
characteristic polynomials.  The characteristic polynomial is computed by
the Faddeev-LeVerrier recursion, which only ever divides by integers.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatchError,
    NonSquareError,
    SingularMatrixError,
)

Rat = Fraction


def rat_str(x: Fraction) -> str:
    """Format a rational as ``"num/den"``, omitting ``/den`` when den = 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer string/int) into a Fraction."""
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, Fraction):
        return s
    return Fraction(str(s).strip())


class QMatrix:
    """An immutable square matrix with exact rational entries."""

    __slots__ = ("rows", "dim", "__dict__")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(Fraction(e) for e in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise NonSquareError(f"expected a square entry grid, got rows of lengths {[len(r) for r in rows]}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "dim", n)

    def __setattr__(self, name, value):
        raise AttributeError("QMatrix is immutable")

    # -- basic accessors ------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.dim)]

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.content_key())

    def content_key(self) -> tuple:
        """Canonical content identity: dimension plus row-major entries.

        Fractions are always stored in lowest terms, so equal matrices have
        equal keys; used for deduplication in word-ball enumeration.
        """
        return (self.dim,) + tuple(e for row in self.rows for e in row)

    def __repr__(self):
        body = "; ".join(" ".join(rat_str(e) for e in row) for row in self.rows)
        return f"QMatrix[{body}]"

    # -- constructors ----------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "QMatrix":
        n = len(entries)
        return cls([[Fraction(entries[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "QMatrix":
        n = len(cols)
        return cls([[Fraction(cols[j][i]) for j in range(n)] for i in range(n)])

    # -- arithmetic -------------------------------------------------------

    def __mul__(self, other: "QMatrix") -> "QMatrix":
        if not isinstance(other, QMatrix):
            return NotImplemented
        if self.dim != other.dim:
            raise DimensionMismatchError(f"cannot multiply {self.dim}x{self.dim} by {other.dim}x{other.dim}")
        n = self.dim
        ocols = other.columns()
        return QMatrix(
            [[sum(self.rows[i][k] * ocols[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
        )

    def __neg__(self) -> "QMatrix":
        return QMatrix([[-e for e in row] for row in self.rows])

    def scale(self, c) -> "QMatrix":
        c = Fraction(c)
        return QMatrix([[c * e for e in row] for row in self.rows])

    def add(self, other: "QMatrix") -> "QMatrix":
        if self.dim != other.dim:
            raise DimensionMismatchError("dimension mismatch in add")
        return QMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def transpose(self) -> "QMatrix":
        return QMatrix([self.column(j) for j in range(self.dim)])

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        if len(vec) != self.dim:
            raise DimensionMismatchError("vector length mismatch")
        return tuple(sum(self.rows[i][j] * Fraction(vec[j]) for j in range(self.dim)) for i in range(self.dim))

    def trace(self) -> Fraction:
        return sum(self.rows[i][i] for i in range(self.dim))

    def pow(self, k: int) -> "QMatrix":
        """Integer power, negative exponents via the exact inverse."""
        if k < 0:
            return self.inverse().pow(-k)
        result = QMatrix.identity(self.dim)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    __pow__ = pow

    # -- derived quantities ------------------------------------------------

    @cached_property
    def det(self) -> Fraction:
        return _det(self.rows)

    @cached_property
    def char_poly(self) -> tuple[Fraction, ...]:
        """Monic characteristic polynomial det(tI - M), highest degree first.

        Faddeev-LeVerrier: M_1 = M, c_k = -tr(M_k)/k, M_{k+1} = M(M_k + c_k I).
        """
        n = self.dim
        coeffs = [Fraction(1)]
        mk = self
        for k in range(1, n + 1):
            ck = -mk.trace() / k
            coeffs.append(ck)
            if k < n:
                mk = self * mk.add(QMatrix.identity(n).scale(ck))
        return tuple(coeffs)

    def inverse(self) -> "QMatrix":
        n = self.dim
        aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv_p = 1 / aug[col][col]
            aug[col] = [e * inv_p for e in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [e - f * p for e, p in zip(aug[r], aug[col])]
        return QMatrix([row[n:] for row in aug])

    def is_identity(self) -> bool:
        return all(
            self.rows[i][j] == (1 if i == j else 0)
            for i in range(self.dim)
            for j in range(self.dim)
        )

    # -- serialization ------------------------------------------------------

    def to_json(self) -> list[list[str]]:
        return [[rat_str(e) for e in row] for row in self.rows]

    @classmethod
    def from_json(cls, rows) -> "QMatrix":
        return cls([[parse_rat(e) for e in row] for row in rows])


def _det(rows) -> Fraction:
    """Determinant by exact Gaussian elimination on a copy."""
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv_p = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv_p
                m[r] = [e - f * p for e, p in zip(m[r], m[col])]
    return det


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a family of rational vectors."""
    if not vectors:
        return 0
    m = [[Fraction(e) for e in v] for v in vectors]
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv_p = 1 / m[r][col]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col] * inv_p
                m[i] = [e - f * p for e, p in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def concat_columns(*column_groups: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Rows of the matrix whose columns are the given column vectors."""
    cols = [c for grp in column_groups for c in grp]
    n = len(cols[0])
    return [[cols[j][i] for j in range(len(cols))] for i in range(n)]
