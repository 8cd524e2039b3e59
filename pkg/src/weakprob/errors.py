"""Exception hierarchy shared by every module of the package."""


class WeakProbError(Exception):
    """Base class for all errors raised by this package."""

    kind = "WeakProbError"


class InputError(WeakProbError, ValueError):
    """Malformed or invalid input data (files, states, bases, parameters)."""

    kind = "InputError"


class DimensionMismatch(WeakProbError, ValueError):
    kind = "DimensionMismatch"


class NotNormalized(InputError):
    kind = "NotNormalized"


class InvalidState(InputError):
    kind = "InvalidState"


class NotOrthonormal(InputError):
    """Raised when a candidate basis fails the Gram-matrix check.

    The worst offending pair ``(j, k)`` and its deviation from the
    Kronecker delta are kept on the exception.
    """

    kind = "NotOrthonormal"

    def __init__(self, message, pair=None, deviation=None):
        super().__init__(message)
        self.pair = pair
        self.deviation = deviation


class DuplicateLabel(InputError):
    kind = "DuplicateLabel"


class BasisMismatch(InputError):
    """Basis identity tags of two objects do not agree."""

    kind = "BasisMismatch"


class InvalidCoupling(InputError):
    kind = "InvalidCoupling"


class ShotBudgetZero(InputError):
    kind = "ShotBudgetZero"


class DomainError(WeakProbError, ArithmeticError):
    """The inputs are well formed but the requested quantity is undefined."""

    kind = "DomainError"


class OverlapTooSmall(DomainError):
    kind = "OverlapTooSmall"

    def __init__(self, message, pair=None, overlap=None):
        super().__init__(message)
        self.pair = pair
        self.overlap = overlap


class ZeroWeakValue(DomainError):
    kind = "ZeroWeakValue"


class ImaginaryLeak(DomainError):
    kind = "ImaginaryLeak"


class NormalizationError(DomainError):
    kind = "NormalizationError"


class UndefinedCells(DomainError):
    kind = "UndefinedCells"

    def __init__(self, message, cells=()):
        super().__init__(message)
        self.cells = tuple(cells)


class PostselectionImpossible(DomainError):
    kind = "PostselectionImpossible"


class NotPhysical(DomainError):
    """A reconstructed operator is not a valid density operator."""

    kind = "NotPhysical"


class ConditioningWarning(UserWarning):
    """Emitted when a division by a small basis overlap amplifies noise."""
