"""Exception types shared across the package."""


class GtasepError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(GtasepError, ValueError):
    """A model parameter is outside its admissible range."""


class DomainError(GtasepError, ValueError):
    """A function argument is outside the supported domain."""


class DegenerateConfigurationError(GtasepError, ValueError):
    """The lattice configuration admits no well-defined update (M = 0 or M = L)."""


class SingularParameterError(GtasepError, ValueError):
    """A Pochhammer factor vanishes inside the terminating summation range."""


class ResourceCapError(GtasepError, RuntimeError):
    """A configured size cap (state space, series order) would be exceeded."""


class IterationLimitError(GtasepError, RuntimeError):
    """An iterative solver failed to converge within its iteration budget."""


class OutOfRadiusError(GtasepError, ValueError):
    """A series evaluation point lies outside the empirically monitored
    convergence radius."""


class DegenerateSeriesError(GtasepError, ValueError):
    """A power series cannot be reverted because its linear coefficient is zero."""
