"""
Exception hierarchy shared by every module.

Input errors (unparseable files, bad configuration) and domain errors
(objects that violate a mathematical invariant) are kept apart so the
command line can map them to distinct exit codes.
"""


class GenericityError(Exception):
    """Base class for all errors raised by this package"""


class InputError(GenericityError, ValueError):
    """A file or configuration value could not be read"""


class MatrixParseError(InputError):
    pass


class ConfigError(InputError):
    pass


class DomainError(GenericityError, ValueError):
    """An object violates a domain invariant"""


class InvalidMatrix(DomainError):
    pass


class NotHermitian(DomainError):
    pass


class DimensionMismatch(DomainError):
    pass


class InvalidDensity(DomainError):
    pass


class InvalidState(DomainError):
    pass


class InsufficientAncilla(DomainError):
    pass


class ZeroImage(DomainError):
    pass


class InsufficientDimension(DomainError):
    pass


class BadRank(DomainError):
    pass


class BudgetTooSmall(DomainError):
    pass


class BudgetExceeded(DomainError):
    pass


class InvalidPerturbation(DomainError):
    pass
