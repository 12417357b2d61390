"""Exception types shared across the package."""


class StopExtError(Exception):
    """Base class for package errors."""


class ParameterError(StopExtError, ValueError):
    """Distribution or family parameters outside their domain."""


class DomainError(StopExtError, ValueError):
    """Function argument outside its domain beyond tolerance."""


class InversionError(StopExtError, RuntimeError):
    """Numeric inversion failed to reach the residual tolerance."""


class PairingError(StopExtError, ValueError):
    """A validated precondition on a pair of operands does not hold."""


class ClosureError(StopExtError, ValueError):
    """Operation requires a family closed under pgf composition."""


class SupportError(StopExtError, ValueError):
    """Data observation outside a model's support."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index
