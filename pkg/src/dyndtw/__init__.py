"""Dynamic dynamic-time-warping under vertex edits, with its test harness."""
from .errors import (DimensionError, EmptyCurveError, InvalidInstanceError,
                     MongeViolation, RebuildRequired, ReductionInconsistencyError,
                     UnsupportedMetricError)
from .metric import EXACT, FLOAT, INF, Curve, CurveEdit, Metric, apply_edit, distance
from .oracle import dtw, dtw_witness, monotone_distance

__all__ = [
    "Curve", "CurveEdit", "Metric", "EXACT", "FLOAT", "INF",
    "apply_edit", "distance", "dtw", "dtw_witness", "monotone_distance",
    "DimensionError", "EmptyCurveError", "InvalidInstanceError", "MongeViolation",
    "RebuildRequired", "ReductionInconsistencyError", "UnsupportedMetricError",
]
