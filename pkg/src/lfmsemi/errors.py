"""Exception taxonomy shared across the package."""


class LfmError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(LfmError):
    """Operands have incompatible or empty dimensions."""


class DomainError(LfmError):
    """Input lies outside the mathematical domain of the operation."""


class NumericError(LfmError):
    """An iteration failed to converge or a residual exceeded tolerance."""


class BranchError(LfmError):
    """Principal matrix logarithm is undefined (eigenvalue on the cut)."""


class PoleError(LfmError):
    """Denominator of a linear fractional map vanished at the point."""


class FormError(LfmError):
    """A map cannot be expressed in the requested structural form."""


class NotInvertibleError(LfmError):
    """The homogeneous matrix of the map is singular."""


class WrongFormError(LfmError):
    """Input belongs to a different normal-form case than requested."""
