"""Seeded random eventually-geometric strategies for oracle cross-checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .star_model import StarEnv
from .strategy_core import GeometricTail, Strategy


@dataclass(frozen=True)
class RandomCase:
    strategy: Strategy
    env: StarEnv
    start: float  # largest turn point of the first tail period

    def max_dist(self, periods: int = 40) -> float:
        assert self.strategy.tail is not None
        return self.start * self.strategy.tail.growth**periods


def random_strategy(rng: np.random.Generator, max_m: int = 5, d_min: float = 1.0) -> RandomCase:
    """A cyclic tail over a random ray order with random per-slot multipliers,
    preceded by a shrunken copy of part of its own (virtual) past.

    The explicit prefix is never longer than the virtual past it imitates,
    so the supremum is governed by the tail.
    """
    m = int(rng.integers(2, max_m + 1))
    base = float(rng.uniform(1.3, 1.8))
    cycle = tuple(int(u) for u in rng.permutation(m))
    mult = tuple(float(x) for x in rng.uniform(1.0, 1.5, size=m))
    growth = base**m
    first = max(mu * base**c for c, mu in enumerate(mult))
    start = d_min * float(rng.uniform(1.0, growth))
    scale = start / first
    tail = GeometricTail(base, scale, cycle, mult)

    n_past = int(rng.integers(1, 3)) * m
    segments = []
    for t in range(-n_past, 0):
        if rng.random() < 0.6:
            x = scale * mult[t % m] * base**t * float(rng.uniform(0.7, 1.0))
            segments.append((x, cycle[t % m]))
    return RandomCase(Strategy(m, tuple(segments), tail), StarEnv(m, d_min), start)
