"""Star search with a predicted ray.

The biased strategy inflates every visit of the predicted ray by a
factor delta. The weak variant trusts a window of 2H+1 rays around the
prediction and searches them in staggered rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .base_solver import optimal_base, rho_star
from .errors import DomainError
from .star_model import StarEnv
from .strategy_core import GeometricTail, RatioReport, Strategy, competitive_ratio


@dataclass(frozen=True)
class BiasedConfig:
    m: int = 2
    b: float = 2.0
    delta: float = 1.0
    predicted_ray: int = 0

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"m must be an integer >= 2, got {self.m}")
        if not self.b > 1:
            raise DomainError(f"base must exceed 1, got {self.b}")
        if not self.delta >= 1:
            raise DomainError(f"delta must be >= 1, got {self.delta}")
        if not 0 <= self.predicted_ray < self.m:
            raise DomainError(f"predicted ray {self.predicted_ray} outside [0, {self.m})")


def build_biased(cfg: BiasedConfig) -> Strategy:
    """Cyclic strategy ``x_i = b^i``, with visits to the predicted ray stretched by ``delta``."""
    mult = tuple(cfg.delta if u == cfg.predicted_ray else 1.0 for u in range(cfg.m))
    return Strategy(cfg.m, (), GeometricTail(cfg.b, 1.0, tuple(range(cfg.m)), mult))


def biased_bounds(cfg: BiasedConfig) -> tuple[float, float]:
    """Exact ``(consistency, robustness)`` of :func:`build_biased`.

    Robustness is attained just beyond turn points on the ray visited
    right after the predicted one, whose next visit is preceded by a
    stretched predicted-ray segment within the same round.
    """
    m, b, d = cfg.m, cfg.b, cfg.delta
    bm = b**m
    consistency = 1.0 + 2.0 * bm / (bm - 1.0) + (2.0 / d) * (bm / (bm - 1.0)) * ((bm - b) / (b - 1.0))
    robustness = 1.0 + 2.0 * bm / (b - 1.0) + 2.0 * (d - 1.0) * b ** (2 * m - 1) / (bm - 1.0)
    return consistency, robustness


def last_ray_robustness(cfg: BiasedConfig) -> float:
    """Worst ratio restricted to the ray visited just before the predicted one."""
    m, b, d = cfg.m, cfg.b, cfg.delta
    bm = b**m
    return (
        1.0
        + 2.0 * d * b ** (m + 1) / (bm - 1.0)
        + 2.0 * (b ** (m + 1) / (bm - 1.0)) * ((bm - b) / (b - 1.0))
        - 2.0 * bm
    )


def measured_biased(cfg: BiasedConfig, env: StarEnv | None = None) -> tuple[RatioReport, RatioReport]:
    env = env or StarEnv(cfg.m, 1.0)
    X = build_biased(cfg)
    return competitive_ratio(X, env, rays=[cfg.predicted_ray]), competitive_ratio(X, env)


def delta_for_consistency(m: int, c_tilde: float) -> tuple[float, float]:
    """Bias giving consistency about ``O(1) + 2 c_tilde`` with base ``m/(m-1)``,
    and the resulting exact robustness."""
    if not c_tilde > 0:
        raise DomainError(f"c_tilde must be positive, got {c_tilde}")
    e = math.e
    delta = max(1.0, e * (rho_star(m) - m) / ((e - 1.0) * c_tilde))
    _, robustness = biased_bounds(BiasedConfig(m, optimal_base(m), delta))
    return delta, robustness


def robustness_floor(m: int, consistency: float) -> float:
    """Lower bound ``1 + 2 rho*_{m-1} (1 + 1/(c~ - 1))`` for a strategy of consistency ``1 + 2 c~``."""
    c_tilde = (consistency - 1.0) / 2.0
    if not c_tilde > 1:
        raise DomainError(f"floor needs consistency > 3, got {consistency}")
    return 1.0 + 2.0 * rho_star(m - 1) * (1.0 + 1.0 / (c_tilde - 1.0))


@dataclass(frozen=True)
class WeakDirectionalConfig:
    m: int = 5
    H: int = 1
    delta: float = 1.0
    predicted_ray: int = 0

    def __post_init__(self) -> None:
        if self.H < 1:
            raise DomainError("tolerance H must be >= 1; use the biased strategy for H=0")
        if not 2 * self.H + 1 < self.m:
            raise DomainError(f"need 2H+1 < m, got H={self.H}, m={self.m}")
        if not self.delta >= 1:
            raise DomainError(f"delta must be >= 1, got {self.delta}")
        if not 0 <= self.predicted_ray < self.m:
            raise DomainError(f"predicted ray {self.predicted_ray} outside [0, {self.m})")

    @property
    def trusted_rays(self) -> tuple[int, ...]:
        return tuple((self.predicted_ray + s) % self.m for s in range(-self.H, self.H + 1))

    @property
    def round_base(self) -> float:
        return (2 * self.H + 1) / (2 * self.H)


def build_weak_directional(cfg: WeakDirectionalConfig, env: StarEnv | None = None) -> Strategy:
    """Rounds over all rays: the ``w = 2H+1`` trusted rays go to ``delta * b^(w i + j)``
    for ``j = 0..2H``, the others to ``b^(w i + 2H)``, with ``b = w / (w-1)``.

    The whole strategy is scaled so round 0 stays within ``d_min``.
    """
    env = env or StarEnv(cfg.m, 1.0)
    m, H, d = cfg.m, cfg.H, cfg.delta
    w = 2 * H + 1
    b = cfg.round_base
    step = b ** (w / m)  # per-iteration growth; one round multiplies by b^w
    mult = tuple(
        d * b**j / step**j if j <= 2 * H else b ** (2 * H) / step**j for j in range(m)
    )
    # slot j is the trusted ray at offset j - H from the prediction
    cycle = tuple((cfg.predicted_ray - H + j) % m for j in range(m))
    scale = env.d_min / (d * b ** (2 * H))
    return Strategy(m, (), GeometricTail(step, scale, cycle, mult))


def weak_directional_ratios(cfg: WeakDirectionalConfig, env: StarEnv | None = None) -> tuple[float, float]:
    """``(sup over trusted rays, sup over all rays)`` of the weak strategy."""
    env = env or StarEnv(cfg.m, 1.0)
    X = build_weak_directional(cfg, env)
    under = competitive_ratio(X, env, rays=cfg.trusted_rays).value
    return under, competitive_ratio(X, env).value


def weak_directional_floor(cfg: WeakDirectionalConfig) -> float:
    """No strategy beats ``1 + 2 rho*_{2H+1}`` on the trusted window."""
    return 1.0 + 2.0 * rho_star(2 * cfg.H + 1)
