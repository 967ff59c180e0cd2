"""Exception types shared across modules."""


class NetworkValidationError(ValueError):
    """Malformed network: non-Hermitian H, bad link indices, bad file contents."""


class SizeError(ValueError):
    """Requested size is outside what an operation supports."""


class OverflowGuardError(ValueError):
    """Tilt too large for double precision exponentials."""


class DegeneracyError(RuntimeError):
    """Leading eigenvalue is not separated from the rest of the spectrum."""


class PositivityError(RuntimeError):
    """A matrix that must be positive (semi)definite is not."""


class ConsistencyError(RuntimeError):
    """Two routes to the same object disagree beyond tolerance."""
