"""Exception hierarchy shared across the package.

Errors that indicate malformed input (bad files, wrong shapes, invalid
parameters) derive from ``InputError``; errors that indicate a search or
verification failed derive from ``SearchError``.  The CLI maps the former
to exit code 2 and the latter to exit code 1.
"""


class FlagdynError(Exception):
    """Base class for all package errors."""


class InputError(FlagdynError):
    """Malformed input: schema, shape or parameter violations."""


class SearchError(FlagdynError):
    """A search or verification did not succeed."""


class SingularMatrixError(InputError):
    """Matrix is not invertible where invertibility is required."""


class NonSquareError(InputError):
    """Entry grid is not square."""


class DimensionMismatchError(InputError):
    """Operands have incompatible dimensions."""


class DeterminantNotOneError(InputError):
    """Group element fails the determinant-one requirement."""


class SchemaError(InputError):
    """Document does not match the expected schema."""


class PrecisionError(FlagdynError):
    """Requested enclosure width is unachievable within the precision cap."""


class DuplicatePointsError(InputError):
    """Point family contains duplicate members."""


class ZeroSeparationError(InputError):
    """Point family has zero minimum separation (duplicates)."""


class NotLoxodromicError(InputError):
    """Element does not have pairwise distinct eigenvalue moduli."""


class MisalignedFixedPointsError(InputError):
    """Fixed points do not lie inside the prescribed neighborhoods."""


class ExceededNMaxError(SearchError):
    """No power within the allowed range achieves the containment."""


class NoLoxodromicError(SearchError):
    """No loxodromic element found within the search radius."""


class ExhaustedTriesError(SearchError):
    """Randomized search hit its retry cap."""


class MixedKindsError(InputError):
    """Set descriptors of different kinds were combined."""


class MalformedWitnessError(InputError):
    """Witness data violates its structural invariants."""


class EmptyListError(InputError):
    """A nonempty list was required."""


class UndecidedMembershipError(FlagdynError):
    """A membership query could not be decided at the precision cap."""
