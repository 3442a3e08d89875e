"""Search on an m-ray star with untrusted predictions."""

from .errors import (
    AmbiguousDecoding,
    DomainError,
    EmptyErrorClass,
    GameOver,
    InvalidStrategy,
    NotFound,
    SchemaError,
    StarSearchError,
    TooFewBranches,
)
from .star_model import (
    AdviceBits,
    Directional,
    ErrorKind,
    Positional,
    PredictionError,
    StarEnv,
    Target,
    classify_error,
)
from .strategy_core import (
    GeometricTail,
    ParallelStrategy,
    RatioReport,
    Strategy,
    TargetInterval,
    competitive_ratio,
    first_hit_cost,
    parallel_consistency,
    parallel_first_hit_cost,
    responsibility_map,
    sup_ratio,
)
from .oracle import brute_force_ratio

__all__ = [name for name in dir() if not name.startswith("_")]
