"""Brute-force ratio oracle: literal walk simulation over a geometric grid of targets."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .star_model import StarEnv
from .strategy_core import StrategyLike, as_branches


def _walk(branch, max_dist: float) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Per ray: turn distances and the clock time at which each outward leg starts."""
    forever = set(branch.rays_searched_forever())
    clock = 0.0
    legs: dict[int, tuple[list[float], list[float]]] = {}
    for i, (x, u) in enumerate(branch.iterations()):
        if i >= len(branch.segments) and not forever:
            break
        turns, starts = legs.setdefault(u, ([], []))
        turns.append(x)
        starts.append(clock)
        clock += x  # out
        clock += x  # back
        if x >= max_dist:
            forever.discard(u)
    return {u: (np.asarray(t), np.asarray(s)) for u, (t, s) in legs.items()}


def brute_force_ratio(
    X: StrategyLike,
    env: StarEnv,
    grid_factor: float,
    max_dist: float,
) -> float:
    """Max of cost/dist over targets ``d_min * grid_factor**n <= max_dist`` on every ray."""
    if not grid_factor > 1:
        raise DomainError(f"grid_factor must exceed 1, got {grid_factor}")
    if max_dist < env.d_min:
        raise DomainError(f"max_dist={max_dist} below d_min={env.d_min}")
    n = int(math.floor(math.log(max_dist / env.d_min) / math.log(grid_factor))) + 1
    dists = env.d_min * grid_factor ** np.arange(n, dtype=float)
    dists = dists[dists <= max_dist * (1 + 1e-15)]
    walks = [_walk(b, max_dist) for b in as_branches(X)]
    worst = 0.0
    for ray in range(env.m):
        arrival = np.full(dists.shape, np.inf)
        for w in walks:
            if ray not in w:
                continue
            turns, starts = w[ray]
            idx = np.searchsorted(turns, dists, side="left")
            ok = idx < turns.size
            t = np.where(ok, starts[np.where(ok, idx, 0)] + dists, np.inf)
            arrival = np.minimum(arrival, t)
        worst = max(worst, float(np.max(arrival / dists)))
    return worst
