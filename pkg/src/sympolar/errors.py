"""Exception hierarchy.

Domain errors (bad input that violates a mathematical precondition) derive
from :class:`DomainError`; failures of a numerical procedure on valid input
derive from :class:`NumericalError`. The CLI maps the two families to
distinct exit codes.
"""


class SympolarError(Exception):
    """Base class for all library errors."""


class DomainError(SympolarError, ValueError):
    """Input violates a precondition of the operation."""


class DimensionError(DomainError):
    """Wrong or inconsistent matrix/vector dimensions."""


class NotSymmetricError(DomainError):
    pass


class NotPositiveDefiniteError(DomainError):
    pass


class NotSymplecticError(DomainError):
    pass


class RankError(DomainError):
    """A family of vectors is not linearly independent."""


class IsotropyError(DomainError):
    """Vectors expected to span an isotropic subspace do not."""


class TransversalityError(DomainError):
    """Two Lagrangian planes expected to be transversal are not."""


class InvalidWignerError(DomainError):
    """Matrix is not a valid Gaussian Wigner matrix (symmetric PD symplectic)."""


class ContainmentError(DomainError):
    """A mixed state's momentum ellipsoid does not contain the dual of its position ellipsoid."""


class UnsupportedError(DomainError):
    """Valid mathematical object, but the operation is not supported for it."""


class NumericalError(SympolarError, ArithmeticError):
    """A numerical procedure failed or produced an out-of-tolerance result."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BlowUpError(NumericalError):
    """Integration produced non-finite values."""

    def __init__(self, message, last_t):
        super().__init__(message)
        self.last_t = last_t
