"""Line search with k bits of untrusted advice.

The advice selects one of p interleaved geometric searchers. With a lie
budget H the bits are read as answers to adaptive subset queries over
the branch indices, so decoding survives up to H corrupted answers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .base_solver import binary_entropy, binom_tail, solve_base
from .errors import AmbiguousDecoding, DomainError, TooFewBranches
from .liargame import LieGameState, ask_next, max_decodable_branches, update
from .star_model import StarEnv, Target
from .strategy_core import (
    GeometricTail,
    ParallelStrategy,
    RatioReport,
    Strategy,
    first_hit_cost,
    parallel_consistency,
)

MAX_ADVICE_BITS = 20
BRANCH_RULES = ("floor", "decodable")


@dataclass(frozen=True)
class AdviceFamilyConfig:
    """``branch_rule="floor"`` uses ``floor(2^k / binom_tail(k, H))`` branches;
    ``"decodable"`` uses the largest count an optimal questioner can separate."""

    r: float = 9.0
    k: int = 1
    H: int = 0
    m: int = 2
    branch_rule: str = "floor"

    def __post_init__(self) -> None:
        if self.m != 2:
            raise DomainError("the advice model is defined on the line only (m=2)")
        if self.r < 9.0 * (1.0 - 1e-12):
            raise DomainError(f"robustness target must be >= 9, got {self.r}")
        if not 1 <= self.k <= MAX_ADVICE_BITS:
            raise DomainError(f"k must lie in [1, {MAX_ADVICE_BITS}], got {self.k}")
        if self.H < 0 or 2 * self.H > self.k:
            raise DomainError(f"tolerance must satisfy 0 <= 2H <= k, got H={self.H}, k={self.k}")
        if self.branch_rule not in BRANCH_RULES:
            raise DomainError(f"branch_rule must be one of {BRANCH_RULES}")

    @property
    def b_r(self) -> float:
        return solve_base(2, self.r)


def branch_count(cfg: AdviceFamilyConfig) -> int:
    if cfg.H == 0:
        p = 2**cfg.k
    elif cfg.branch_rule == "decodable":
        p = max_decodable_branches(cfg.k, cfg.H)
    else:
        p = 2**cfg.k // binom_tail(cfg.k, cfg.H)
    if p < 2:
        raise TooFewBranches(f"k={cfg.k}, H={cfg.H} supports only {p} branch(es)")
    return p


def build_advice_family(cfg: AdviceFamilyConfig, env: Optional[StarEnv] = None) -> ParallelStrategy:
    """``p`` copies of the geometric strategy with base ``b_r``, staggered by ``b_r^(2/p)``.

    All branches start on ray 0; branch ``j`` is scaled by ``b_r^(2j/p)``,
    so on each ray the union of turn points is geometric with ratio
    ``b_r^(2/p)``. The overall scale puts the first turn point on each
    ray at or below ``d_min``.
    """
    env = env or StarEnv(2, 1.0)
    p = branch_count(cfg)
    b = cfg.b_r
    g = b ** (2.0 / p)
    sigma = env.d_min / b
    return ParallelStrategy(
        tuple(
            Strategy(2, (), GeometricTail(b, sigma * g**j, (0, 1), (1.0, 1.0)))
            for j in range(p)
        )
    )


def consistency_bound(cfg: AdviceFamilyConfig) -> float:
    b = cfg.b_r
    return 1.0 + 2.0 * b ** (2.0 / branch_count(cfg)) / (b - 1.0)


def entropy_gap(cfg: AdviceFamilyConfig) -> float:
    """Entropy upper bound ``2^(k (h(H/k) - 1) + 1)`` on ``binom_tail(k, H) / 2^(k-1)``."""
    k, H = cfg.k, cfg.H
    if not (0 < H and 2 * H < k):
        raise DomainError(f"entropy bound needs 0 < H < k/2, got H={H}, k={k}")
    bound = 2.0 ** (k * (binary_entropy(H / k) - 1.0) + 1.0)
    inv_q = binom_tail(k, H) / 2 ** (k - 1)
    assert inv_q <= bound * (1.0 + 1e-12), (inv_q, bound)
    return bound


def run_advice_protocol(cfg: AdviceFamilyConfig, true_branch: int, lie_positions: Iterable[int]) -> int:
    """Play the k-query game with a responder that flips the answers at ``lie_positions``."""
    p = branch_count(cfg)
    lies = frozenset(lie_positions)
    if not 0 <= true_branch < p:
        raise DomainError(f"true_branch {true_branch} outside [0, {p})")
    if len(lies) > cfg.H:
        raise DomainError(f"{len(lies)} lies exceed the tolerance H={cfg.H}")
    if any(not 0 <= i < cfg.k for i in lies):
        raise DomainError(f"lie positions must lie in [0, {cfg.k})")
    state = LieGameState.initial(p, cfg.H, cfg.k)
    for i in range(cfg.k):
        query = ask_next(state)
        if query is None:
            break
        answer = (true_branch in query) != (i in lies)
        state = update(state, query, int(answer))
    alive = state.survivors()
    if len(alive) != 1:
        raise AmbiguousDecoding(f"{len(alive)} branches survive: {alive}")
    return alive[0]


def lie_patterns(k: int, H: int) -> Iterator[frozenset[int]]:
    for n in range(H + 1):
        for combo in itertools.combinations(range(k), n):
            yield frozenset(combo)


def protocol_failures(cfg: AdviceFamilyConfig) -> list[tuple[int, frozenset[int]]]:
    """Every (branch, lie pattern) for which the protocol does not return the branch."""
    bad = []
    for j in range(branch_count(cfg)):
        for lies in lie_patterns(cfg.k, cfg.H):
            try:
                ok = run_advice_protocol(cfg, j, lies) == j
            except AmbiguousDecoding:
                ok = False
            if not ok:
                bad.append((j, lies))
    return bad


def best_branch(P: ParallelStrategy, t: Target) -> int:
    """Branch the honest advice points to: cheapest for ``t``, lowest index on ties."""
    costs = [first_hit_cost(b, t) for b in P.branches]
    low = min(costs)
    return next(j for j, c in enumerate(costs) if c <= low * (1.0 + 1e-12))


def probe_targets(P: ParallelStrategy, env: StarEnv, periods: int = 3, eps: float = 1e-9) -> list[Target]:
    """Targets just beyond every turn point in the first ``periods`` tail periods, plus ``d_min``."""
    out = [Target(u, env.d_min) for u in range(env.m)]
    for b in P.branches:
        assert b.tail is not None
        for t in range(periods * b.tail.period):
            x = b.tail.length(t)
            if x >= env.d_min:
                out.append(Target(b.tail.ray(t), x * (1.0 + eps)))
    return out


def end_to_end_ratio(
    cfg: AdviceFamilyConfig,
    env: Optional[StarEnv] = None,
    targets: Optional[Sequence[Target]] = None,
) -> float:
    """Worst ratio when the searcher follows the branch decoded from advice
    corrupted by any admissible lie pattern. Raises :class:`AmbiguousDecoding`
    if some pattern cannot be decoded."""
    env = env or StarEnv(2, 1.0)
    P = build_advice_family(cfg, env)
    targets = list(targets) if targets is not None else probe_targets(P, env)
    worst = 0.0
    patterns = list(lie_patterns(cfg.k, cfg.H))
    for t in targets:
        j = best_branch(P, t)
        for lies in patterns:
            chosen = run_advice_protocol(cfg, j, lies)
            worst = max(worst, first_hit_cost(P.branches[chosen], t) / t.dist)
    return worst


def measured_consistency(cfg: AdviceFamilyConfig, env: Optional[StarEnv] = None) -> RatioReport:
    env = env or StarEnv(2, 1.0)
    return parallel_consistency(build_advice_family(cfg, env), env)
