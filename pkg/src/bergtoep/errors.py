"""Exception types shared across the package."""


class BergtoepError(Exception):
    """Base class for all package errors."""


class InvalidPointError(BergtoepError, ValueError):
    """Point lies outside the (closed) domain or too close to the boundary."""


class ChartDomainError(BergtoepError, ValueError):
    """Point lies outside the neighbourhood where a boundary chart is valid."""


class AdmissibilityError(BergtoepError, ValueError):
    """Parameters violate an admissibility window; the message names the
    violated inequality."""


class ConfigurationError(BergtoepError, ValueError):
    """Invalid grid sizes, schedules, or run configuration."""


class ConditioningError(BergtoepError, ArithmeticError):
    """A weighted similarity transform is numerically singular."""


class UnsupportedSymbolError(BergtoepError, ValueError):
    """Operation requires a radial / closed-form symbol."""


class IterationError(BergtoepError, RuntimeError):
    """Power iteration failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_value: float):
        super().__init__(message)
        self.last_value = last_value
