"""Star search with a predicted target position (distance and ray).

The strategy is the geometric strategy with base ``b_r``, rescaled and
rotated so that one of its turn points lands exactly on the prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .base_solver import r_star, solve_base
from .errors import DomainError, EmptyErrorClass
from .star_model import ErrorKind, Positional, StarEnv, Target
from .strategy_core import (
    REL_EPS,
    GeometricTail,
    RatioReport,
    Strategy,
    TargetInterval,
    first_hit_cost,
    hit_ratio_sup,
    sup_ratio,
)


@dataclass(frozen=True)
class PositionalConfig:
    m: int = 2
    r: float = 9.0
    d_h: float = 1.0
    u_h: int = 0
    H: float = 0.0

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"m must be an integer >= 2, got {self.m}")
        if self.r < r_star(self.m) * (1.0 - 1e-12):
            raise DomainError(f"r={self.r} below the optimal ratio {r_star(self.m)}")
        if not 0 <= self.u_h < self.m:
            raise DomainError(f"predicted ray {self.u_h} outside [0, {self.m})")
        if not self.d_h > 0:
            raise DomainError(f"predicted distance must be positive, got {self.d_h}")
        if self.H < 0:
            raise DomainError(f"tolerance must be non-negative, got {self.H}")

    @property
    def b_r(self) -> float:
        return solve_base(self.m, self.r)

    @property
    def prediction(self) -> Positional:
        return Positional(self.d_h, self.u_h)


def _aligned(m: int, b: float, d: float, ray: int, env: StarEnv) -> Strategy:
    if d < env.d_min * (1.0 - REL_EPS):
        raise DomainError(f"predicted distance {d} below d_min={env.d_min}")
    # least j with d_min * b^j >= d
    j = max(0, math.ceil(math.log(d / env.d_min) / math.log(b) - 1e-12))
    while j > 0 and env.d_min * b ** (j - 1) >= d:
        j -= 1
    while env.d_min * b**j < d * (1.0 - REL_EPS):
        j += 1
    cycle = tuple((ray - j + c) % m for c in range(m))
    return Strategy(m, (), GeometricTail(b, d / b**j, cycle, (1.0,) * m))


def build_positional(cfg: PositionalConfig, env: Optional[StarEnv] = None) -> Strategy:
    """Geometric strategy with base ``b_r`` whose turn point ``j_h`` is exactly the prediction.

    ``j_h`` is the least index with ``d_min * b_r^j_h >= d_h``, so the scale
    ``d_h / b_r^j_h`` lies in ``(d_min / b_r, d_min]``.
    """
    env = env or StarEnv(cfg.m, 1.0)
    return _aligned(cfg.m, cfg.b_r, cfg.d_h, cfg.u_h, env)


def build_weak_positional(cfg: PositionalConfig, env: Optional[StarEnv] = None) -> Strategy:
    """Aligned strategy for the inflated prediction ``d_h (1 + H)``."""
    env = env or StarEnv(cfg.m, 1.0)
    return _aligned(cfg.m, cfg.b_r, cfg.d_h * (1.0 + cfg.H), cfg.u_h, env)


def consistency_bound(cfg: PositionalConfig) -> float:
    return 1.0 + 2.0 / (cfg.b_r - 1.0)


def weak_bound(cfg: PositionalConfig, eta: Optional[float] = None) -> float:
    """``min(1 + 2 (1 + eta) / (b_r - 1), r)``; ``eta`` defaults to the tolerance."""
    eta = cfg.H if eta is None else eta
    return min(1.0 + 2.0 * (1.0 + eta) / (cfg.b_r - 1.0), cfg.r)


def ratio_at_prediction(X: Strategy, h: Positional) -> float:
    return first_hit_cost(X, Target(h.ray, h.dist)) / h.dist


def family_consistency(m: int, r: float, env: Optional[StarEnv] = None) -> RatioReport:
    """Worst ratio at the prediction over all predictions, each searched by its own aligned strategy."""
    env = env or StarEnv(m, 1.0)
    cfg = PositionalConfig(m, r, env.d_min, 0)
    return hit_ratio_sup(build_positional(cfg, env), env)


def error_intervals(h: Positional, kind: ErrorKind, eta_max: float, env: StarEnv) -> list[TargetInterval]:
    """Targets whose error with respect to ``h`` has the given kind and size at most ``eta_max``.

    A target at the predicted point counts as a positive error of size 0.
    """
    if eta_max < 0:
        raise DomainError(f"eta_max must be non-negative, got {eta_max}")
    if kind is ErrorKind.POSITIVE:
        return [TargetInterval(h.ray, h.dist, h.dist * (1.0 + eta_max))]
    if kind is ErrorKind.NEGATIVE:
        lo = max(env.d_min, h.dist * (1.0 - eta_max))
        if lo >= h.dist:
            raise EmptyErrorClass(f"no target below {h.dist} within relative error {eta_max}")
        return [TargetInterval(h.ray, lo, h.dist)]
    return [TargetInterval(u, env.d_min) for u in range(env.m) if u != h.ray]


def ratio_under_error(
    X: Strategy,
    h: Positional,
    kind: ErrorKind,
    eta_max: float,
    env: Optional[StarEnv] = None,
) -> RatioReport:
    env = env or StarEnv(X.m, 1.0)
    return sup_ratio(X, env, error_intervals(h, kind, eta_max, env))


def sweep_ratio(X: Strategy, h: Positional, kind: ErrorKind, eta_max: float,
                env: Optional[StarEnv] = None, points: int = 20001, far: float = 1e6) -> float:
    """Max ratio over a dense finite grid of targets in the error class (no limits taken).

    Ray-mismatch targets are sampled geometrically up to ``far * d_min``.
    """
    env = env or StarEnv(X.m, 1.0)
    worst = 0.0
    for iv in error_intervals(h, kind, eta_max, env):
        if math.isinf(iv.hi):
            ds = np.geomspace(iv.lo, iv.lo * far, points)
        else:
            ds = np.linspace(iv.lo, iv.hi, points)
            if kind is ErrorKind.NEGATIVE:
                ds = ds[ds < iv.hi]
        for d in ds:
            worst = max(worst, first_hit_cost(X, Target(iv.ray, float(d))) / float(d))
    return worst
