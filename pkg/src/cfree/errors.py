"""Exception types shared across the package."""


class CFreeError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(CFreeError, ValueError):
    """Operands have incompatible dimensions."""


class SingularMatrixError(CFreeError, ValueError):
    """Matrix is singular to within the pivot tolerance."""


class InadmissibleWordError(CFreeError, ValueError):
    """A tensor word violates the alternation or terminal constraints."""


class DepthOverflowError(CFreeError, ValueError):
    """A construction would need more letters than the basis retains."""


class CenteringError(CFreeError, ValueError):
    """An operator pair that should carry vacuum expectation zero does not."""


class SeriesError(CFreeError, ValueError):
    """A truncated series operation violates its precondition."""


class PoleCancellationError(SeriesError):
    """The simple pole in the R-transform difference failed to cancel."""


class DomainRadiusError(CFreeError, ValueError):
    """An evaluation point lies outside the guarded disk."""


class NewtonConvergenceError(CFreeError, RuntimeError):
    """Newton iteration failed to reach the target residual."""


class ConfigError(CFreeError, ValueError):
    """Invalid run configuration (CLI exit code 2)."""
