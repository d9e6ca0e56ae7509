"""Full flags of rational subspaces: canonical forms, group action,
transversality and a principal-angle metric.

A flag V_1 < ... < V_{d-1} is stored as an invertible basis matrix whose
first i columns span V_i.  The canonical form reduces column j modulo the
pivot rows of the earlier columns and scales its first nonzero entry to 1;
two bases related by an invertible upper-triangular change of coordinates
reduce to the same matrix, so flag equality is plain matrix equality.

Transversality of two flags is a finite set of determinant conditions:
V_i and W_{d-i} meet trivially iff the first i columns of one basis
together with the first d-i columns of the other are linearly independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .certreal import Interval, iv_acos, iv_sqrt, pi_interval
from .errors import DimensionMismatchError, SingularMatrixError
from .qlinalg import QMatrix, _det, concat_columns
from .spectra import real_root_enclosures, trailing_zero_multiplicity


class Flag:
    """A full flag in canonical column form; equality is bit-equality."""

    __slots__ = ("basis", "dim")

    def __init__(self, basis: QMatrix, _canonical: bool = False):
        if not _canonical:
            raise ValueError("use canonicalize() to construct flags")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "dim", basis.dim)

    def __setattr__(self, name, value):
        raise AttributeError("Flag is immutable")

    def __eq__(self, other):
        return isinstance(other, Flag) and self.basis == other.basis

    def __hash__(self):
        return hash(("flag", self.basis.content_key()))

    def __repr__(self):
        return f"Flag({self.basis!r})"

    def subspace_columns(self, i: int) -> list[tuple[Fraction, ...]]:
        """Spanning columns of V_i."""
        return [self.basis.column(j) for j in range(i)]

    def to_json(self):
        return {"dim": self.dim, "basis": self.basis.to_json()}

    @classmethod
    def from_json(cls, obj) -> "Flag":
        return canonicalize(QMatrix.from_json(obj["basis"]))


def canonicalize(basis: QMatrix) -> Flag:
    """Unique canonical representative of the flag spanned by the columns.

    Column j is reduced modulo the earlier pivot rows and scaled so its
    first nonzero entry is 1; idempotent by construction.
    """
    n = basis.dim
    cols = [list(basis.column(j)) for j in range(n)]
    canon: list[list[Fraction]] = []
    pivots: list[int] = []
    for j in range(n):
        c = cols[j][:]
        for i, r in enumerate(pivots):
            f = c[r]
            if f != 0:
                c = [a - f * b for a, b in zip(c, canon[i])]
        piv = next((r for r in range(n) if c[r] != 0), None)
        if piv is None:
            raise SingularMatrixError("singular basis does not span a flag")
        inv = 1 / c[piv]
        c = [a * inv for a in c]
        canon.append(c)
        pivots.append(piv)
    return Flag(QMatrix.from_columns(canon), _canonical=True)


def standard_flag(n: int) -> Flag:
    return canonicalize(QMatrix.identity(n))


def act(g: QMatrix, x: Flag) -> Flag:
    """Left action on flags: the flag of subspaces g V_i."""
    if g.dim != x.dim:
        raise DimensionMismatchError("group element and flag dimensions differ")
    return canonicalize(g * x.basis)


def transversal(x: Flag, y: Flag) -> bool:
    """True iff V_i and W_{d-i} intersect trivially for every i."""
    if x.dim != y.dim:
        raise DimensionMismatchError("flags of different dimension")
    d = x.dim
    xcols = x.basis.columns()
    ycols = y.basis.columns()
    for i in range(1, d):
        rows = concat_columns(xcols[:i], ycols[: d - i])
        if _det(rows) == 0:
            return False
    return True


def transversal_partner(x: Flag) -> Flag:
    """A flag transversal to x, obtained by reversing its basis columns."""
    cols = list(reversed(x.basis.columns()))
    return canonicalize(QMatrix.from_columns(cols))


@dataclass(frozen=True)
class FlagPair:
    x: Flag
    y: Flag
    transversal: bool


def make_pair(x: Flag, y: Flag) -> FlagPair:
    return FlagPair(x, y, transversal(x, y))


# -- principal-angle metric ---------------------------------------------------


def _projection(cols: Sequence[Sequence[Fraction]], n: int) -> QMatrix:
    """Orthogonal projection P = X (X^T X)^{-1} X^T onto the column span."""
    k = len(cols)
    gram = [[sum(a * b for a, b in zip(ci, cj)) for cj in cols] for ci in cols]
    gram_inv = QMatrix(gram).inverse()
    # P[i][j] = sum_{s,t} X[i][s] gram_inv[s][t] X[j][t]
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(
                sum(
                    cols[s][i] * gram_inv[s, t] * cols[t][j]
                    for s in range(k)
                    for t in range(k)
                )
            )
        entries.append(row)
    return QMatrix(entries)


def largest_principal_angle(
    x_cols: Sequence[Sequence[Fraction]],
    y_cols: Sequence[Sequence[Fraction]],
    n: int,
    eps: Fraction,
) -> Interval:
    """Enclosure of the largest principal angle between two i-dim subspaces.

    The nonzero eigenvalues of P_X P_Y are the squared cosines of the
    principal angles; the multiplicity of the zero eigenvalue beyond the
    structural n - i detects exact right angles.
    """
    i = len(x_cols)
    px = _projection(x_cols, n)
    py = _projection(y_cols, n)
    coeffs = list((px * py).char_poly)
    m0 = trailing_zero_multiplicity(coeffs)
    structural = n - i
    right_angles = m0 - structural
    if right_angles < 0:
        raise ValueError("projection product has too few zero eigenvalues")
    if right_angles > 0:
        return pi_interval(64).scale(Fraction(1, 2))
    reduced = [Fraction(c) for c in coeffs[: len(coeffs) - m0]]
    # acos(sqrt(.)) steepens without bound as cos^2 approaches 1 (small
    # angles), so refine the root enclosure until the angle width lands
    bits = 48
    width = eps / 8
    for _ in range(24):
        enclosures = real_root_enclosures(reduced, width)
        smallest = enclosures[0][0]  # ascending order: smallest cos^2 = largest angle
        lo = max(smallest.lo, Fraction(0))
        hi = min(smallest.hi, Fraction(1))
        angle = iv_acos(iv_sqrt(Interval(lo, hi), bits), bits)
        if angle.width <= eps:
            return angle
        width /= 16
        bits = min(bits + 16, 512)
    return angle


def flag_distance(x: Flag, y: Flag, eps: Fraction = Fraction(1, 2**30)) -> Interval:
    """Max over i of the largest principal angle between V_i(x) and V_i(y).

    Returns a certified enclosure; callers compare distances with an
    explicit margin so the enclosure width is absorbed.
    """
    if x.dim != y.dim:
        raise DimensionMismatchError("flags of different dimension")
    if x == y:
        return Interval(0)
    n = x.dim
    best: Optional[Interval] = None
    for i in range(1, n):
        ang = largest_principal_angle(x.subspace_columns(i), y.subspace_columns(i), n, eps)
        best = ang if best is None else Interval(max(best.lo, ang.lo), max(best.hi, ang.hi))
    return best


@dataclass(frozen=True)
class FalsifierVerdict:
    consistent: bool
    counterexample: Optional[QMatrix]


def stabilizer_falsifier(c: QMatrix, x: Flag, y: Flag, sample: Sequence[QMatrix]) -> FalsifierVerdict:
    """Search the sample for g with (c g).x != g.y.

    Finding one refutes "c g x = g y for all g"; finding none is only
    consistency, not a proof.
    """
    if not sample:
        raise ValueError("sample must be nonempty")
    for g in sample:
        if act(c * g, x) != act(g, y):
            return FalsifierVerdict(False, g)
    return FalsifierVerdict(True, None)
