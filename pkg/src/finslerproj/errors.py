"""Exception hierarchy shared across the library."""


class FinslerError(Exception):
    """Base class for all library errors."""


class DomainError(FinslerError):
    """A point lies outside (or too close to the boundary of) a metric's domain."""


class ConstructionError(FinslerError):
    """Invalid data supplied to a metric or report constructor."""


class ConvexityError(FinslerError):
    """The fundamental tensor is singular or indefinite where it must not be."""


class AccuracyError(FinslerError):
    """A numerical differentiation or quadrature did not reach its target accuracy."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class ConnectivityError(FinslerError):
    """Boundary-value solve failed to join two points."""

    def __init__(self, message, best_miss=None):
        super().__init__(message)
        self.best_miss = best_miss


class StiffnessError(FinslerError):
    """Step-size underflow inside an ODE integration."""


class PoleError(FinslerError):
    """Evaluation of a Moebius transform at (or too close to) its pole."""


class CriticalPointError(FinslerError):
    """Schwarzian derivative requested where the first derivative vanishes."""


class ChartError(FinslerError):
    """Projective-parameter evaluation at a pole, or probes straddling charts."""


class NotProjectiveError(FinslerError):
    """Two metrics are not projectively related at the sampled line element."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InadmissibleChartError(FinslerError):
    """No single Moebius chart covers both chain endpoints."""

    def __init__(self, message, attainable_range=None):
        super().__init__(message)
        self.attainable_range = attainable_range


class HypothesisError(FinslerError):
    """A checker's negative-Ricci-bound precondition does not hold."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConfigError(FinslerError):
    """Malformed CLI configuration."""
