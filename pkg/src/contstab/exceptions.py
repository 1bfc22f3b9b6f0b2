"""Exception hierarchy.

Input problems derive from :class:`DomainError` (a ``ValueError``) and map to
CLI exit code 2; numerical failures derive from :class:`NumericalError`
(an ``ArithmeticError``) and map to exit code 3.
"""


class ContinuationError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ContinuationError, ValueError):
    """A point or parameter lies outside the region where an operation is defined."""


class ConfigurationError(DomainError):
    """Geometry parameters violate the geometry's invariants."""


class NearDegenerateError(DomainError):
    """A point is too close to the data curve or to the domain boundary."""


class BranchPointError(DomainError):
    """A point lies on the branch cut [-1, 1] of the inverse Joukowski map."""


class NumericalError(ContinuationError, ArithmeticError):
    """A numerical procedure could not deliver a trustworthy result."""


class ResolutionError(NumericalError):
    """A series needed more terms than the hard truncation cap allows."""


class ConditioningError(NumericalError):
    """A linear system is too ill-conditioned for the requested regularization."""
