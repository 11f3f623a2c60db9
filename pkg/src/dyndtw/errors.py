"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Points of different dimension were mixed."""


class UnsupportedMetricError(ValueError):
    """The metric cannot be evaluated in the requested scalar mode."""


class EmptyCurveError(ValueError):
    """A curve has (or would end up with) no vertices."""


class RebuildRequired(RuntimeError):
    """The partition has used up its update budget and must be rebuilt."""


class InvalidInstanceError(ValueError):
    """An Intermediary instance violates its structural invariants."""


class ReductionInconsistencyError(AssertionError):
    """The curve reduction disagrees with the direct Intermediary solver."""


class MongeViolation(AssertionError):
    """A boundary distance table failed the Monge check."""
