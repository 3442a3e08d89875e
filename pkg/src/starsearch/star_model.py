"""Geometry of the m-ray star: environments, targets, predictions, errors."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Optional, Union

from .errors import DomainError, SchemaError


@dataclass(frozen=True)
class StarEnv:
    """An m-ray star; targets are assumed to lie at distance ``>= d_min``."""

    m: int = 2
    d_min: float = 1.0

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"m must be an integer >= 2, got {self.m!r}")
        if not self.d_min > 0:
            raise DomainError(f"d_min must be positive, got {self.d_min!r}")


@dataclass(frozen=True)
class Target:
    ray: int
    dist: float

    def validate(self, env: StarEnv) -> None:
        if not 0 <= self.ray < env.m:
            raise DomainError(f"target ray {self.ray} outside [0, {env.m})")
        if self.dist < env.d_min:
            raise DomainError(f"target distance {self.dist} below d_min={env.d_min}")

    def to_dict(self) -> dict:
        return {"ray": int(self.ray), "dist": float(self.dist)}

    @classmethod
    def from_dict(cls, data: dict) -> "Target":
        try:
            return cls(ray=int(data["ray"]), dist=float(data["dist"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad target {data!r}: {exc}") from exc


@dataclass(frozen=True)
class AdviceBits:
    bits: str

    def __post_init__(self) -> None:
        if any(c not in "01" for c in self.bits):
            raise DomainError(f"advice must be a bit-string, got {self.bits!r}")

    @property
    def k(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class Directional:
    ray: int


@dataclass(frozen=True)
class Positional:
    dist: float
    ray: int


Prediction = Union[AdviceBits, Directional, Positional]


def validate_prediction(pred: Prediction, env: StarEnv, k: Optional[int] = None) -> None:
    if isinstance(pred, AdviceBits):
        if k is not None and pred.k != k:
            raise DomainError(f"advice has {pred.k} bits, expected {k}")
        return
    if not 0 <= pred.ray < env.m:
        raise DomainError(f"predicted ray {pred.ray} outside [0, {env.m})")
    if isinstance(pred, Positional) and pred.dist < env.d_min:
        raise DomainError(f"predicted distance {pred.dist} below d_min={env.d_min}")


def prediction_to_dict(pred: Prediction) -> dict:
    if isinstance(pred, AdviceBits):
        return {"kind": "advice", "bits": pred.bits}
    if isinstance(pred, Directional):
        return {"kind": "directional", "ray": int(pred.ray)}
    return {"kind": "positional", "dist": float(pred.dist), "ray": int(pred.ray)}


def prediction_from_dict(data: dict[str, Any]) -> Prediction:
    kind = data.get("kind") if isinstance(data, dict) else None
    try:
        if kind == "advice":
            return AdviceBits(str(data["bits"]))
        if kind == "directional":
            return Directional(int(data["ray"]))
        if kind == "positional":
            return Positional(float(data["dist"]), int(data["ray"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad {kind} prediction {data!r}: {exc}") from exc
    raise SchemaError(f"unknown prediction kind {kind!r}")


class ErrorKind(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    RAY_MISMATCH = "ray_mismatch"


@dataclass(frozen=True)
class PredictionError:
    kind: ErrorKind
    eta: Optional[float]  # None for RAY_MISMATCH


def classify_error(pred: Positional, t: Target) -> PredictionError:
    """Classify the error of a positional prediction against the real target.

    A target at exactly the predicted distance counts as a positive error
    with ``eta == 0``.
    """
    if t.ray != pred.ray:
        return PredictionError(ErrorKind.RAY_MISMATCH, None)
    eta = abs(t.dist - pred.dist) / pred.dist
    kind = ErrorKind.NEGATIVE if t.dist < pred.dist else ErrorKind.POSITIVE
    return PredictionError(kind, eta)
