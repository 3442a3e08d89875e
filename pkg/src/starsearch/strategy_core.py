"""Search strategies on the star and exact worst-case ratio evaluation.

A strategy is a finite list of explicit segments followed by an optional
geometric tail. Worst-case targets sit infinitesimally beyond turn points,
so suprema are taken over those limits plus the interval endpoints; the
contribution of the infinite tail is obtained in closed form by comparing
each tail slot against an "infinite past" extension of every tail, which
is exactly the asymptotic behaviour once all explicit segments are
negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, InvalidStrategy, NotFound, SchemaError
from .star_model import StarEnv, Target

# distances equal up to this relative amount are treated as equal
REL_EPS = 1e-12
CONVERGENCE_TOL = 1e-9
# default horizon: enough tail periods for the growth to exceed this factor
HORIZON_GROWTH = 1e16
MIN_PERIODS = 3


@dataclass(frozen=True)
class GeometricTail:
    """Tail iteration ``t`` explores ``ray_cycle[t % L]`` to
    ``scale * mult[t % L] * base**t``."""

    base: float
    scale: float
    ray_cycle: tuple[int, ...]
    mult: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ray_cycle", tuple(int(r) for r in self.ray_cycle))
        object.__setattr__(self, "mult", tuple(float(x) for x in self.mult))
        if not self.base > 1:
            raise InvalidStrategy(f"tail base must exceed 1, got {self.base}")
        if not self.scale > 0:
            raise InvalidStrategy(f"tail scale must be positive, got {self.scale}")
        if not self.ray_cycle:
            raise InvalidStrategy("tail ray_cycle must be non-empty")
        if len(self.mult) != len(self.ray_cycle):
            raise InvalidStrategy("tail mult must have one entry per ray_cycle entry")
        if any(not x > 0 for x in self.mult):
            raise InvalidStrategy("tail multipliers must be positive")

    @property
    def period(self) -> int:
        return len(self.ray_cycle)

    @property
    def growth(self) -> float:
        """Factor by which every turn point grows over one full period."""
        return self.base**self.period

    def length(self, t: int) -> float:
        return self.scale * self.mult[t % self.period] * self.base**t

    def ray(self, t: int) -> int:
        return self.ray_cycle[t % self.period]

    def unscaled_sum(self, t: int) -> float:
        """``sum_{j<t} mult[j % L] * base**j`` for ``0 <= t``."""
        return math.fsum(self.mult[j % self.period] * self.base**j for j in range(t))

    def past_sum(self) -> float:
        """Unscaled length of the tail extended to all negative iterations."""
        return self.unscaled_sum(self.period) / (self.growth - 1.0)

    def scaled(self, lam: float) -> "GeometricTail":
        return GeometricTail(self.base, self.scale * lam, self.ray_cycle, self.mult)


@dataclass(frozen=True)
class Strategy:
    """Explicit ``(length, ray)`` segments, then an optional geometric tail.

    Every ray's sequence of lengths must be strictly increasing: a segment
    that does not go beyond the previous visit explores nothing new.
    """

    m: int
    segments: tuple[tuple[float, int], ...] = ()
    tail: Optional[GeometricTail] = None

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise InvalidStrategy(f"m must be an integer >= 2, got {self.m!r}")
        segs = tuple((float(x), int(u)) for x, u in self.segments)
        object.__setattr__(self, "segments", segs)
        last: dict[int, float] = {}
        for i, (x, u) in enumerate(segs):
            if not 0 <= u < self.m:
                raise InvalidStrategy(f"segment {i}: ray {u} outside [0, {self.m})")
            if not x > 0:
                raise InvalidStrategy(f"segment {i}: length must be positive, got {x}")
            if u in last and x <= last[u]:
                raise InvalidStrategy(
                    f"segment {i}: length {x} does not exceed previous visit {last[u]} on ray {u}"
                )
            last[u] = x
        if self.tail is None:
            return
        tail = self.tail
        if any(not 0 <= u < self.m for u in tail.ray_cycle):
            raise InvalidStrategy(f"tail ray_cycle {tail.ray_cycle} has rays outside [0, {self.m})")
        # one period plus the first repeat fixes the order forever
        for t in range(2 * tail.period):
            u, x = tail.ray(t), tail.length(t)
            if u in last and x <= last[u]:
                raise InvalidStrategy(
                    f"tail iteration {t}: length {x} does not exceed previous visit {last[u]} on ray {u}"
                )
            last[u] = x

    # -- construction helpers -------------------------------------------------

    @classmethod
    def geometric(
        cls,
        m: int,
        base: float,
        *,
        scale: float = 1.0,
        order: Optional[Sequence[int]] = None,
    ) -> "Strategy":
        """The cyclic geometric strategy ``x_i = scale * base**i``."""
        cycle = tuple(order) if order is not None else tuple(range(m))
        return cls(m, (), GeometricTail(base, scale, cycle, (1.0,) * len(cycle)))

    def scaled(self, lam: float) -> "Strategy":
        if not lam > 0:
            raise DomainError(f"scale factor must be positive, got {lam}")
        tail = self.tail.scaled(lam) if self.tail is not None else None
        return Strategy(self.m, tuple((x * lam, u) for x, u in self.segments), tail)

    def relabeled(self, perm: Sequence[int]) -> "Strategy":
        """Rename ray ``u`` to ``perm[u]`` everywhere."""
        segs = tuple((x, perm[u]) for x, u in self.segments)
        tail = None
        if self.tail is not None:
            t = self.tail
            tail = GeometricTail(t.base, t.scale, tuple(perm[u] for u in t.ray_cycle), t.mult)
        return Strategy(self.m, segs, tail)

    # -- iteration ------------------------------------------------------------

    def iterations(self) -> Iterator[tuple[float, int]]:
        yield from self.segments
        if self.tail is not None:
            t = 0
            while True:
                yield self.tail.length(t), self.tail.ray(t)
                t += 1

    def rays_searched_forever(self) -> frozenset[int]:
        return frozenset(self.tail.ray_cycle) if self.tail is not None else frozenset()

    def explicit_total(self) -> float:
        return math.fsum(x for x, _ in self.segments)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        tail = None
        if self.tail is not None:
            tail = {
                "base": self.tail.base,
                "scale": self.tail.scale,
                "ray_cycle": list(self.tail.ray_cycle),
                "mult": list(self.tail.mult),
            }
        return {
            "m": self.m,
            "segments": [{"len": x, "ray": u} for x, u in self.segments],
            "tail": tail,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Strategy":
        from .schema import validate_strategy_document

        validate_strategy_document(data)
        tail = data.get("tail")
        try:
            return cls(
                int(data["m"]),
                tuple((s["len"], s["ray"]) for s in data["segments"]),
                GeometricTail(tail["base"], tail["scale"], tail["ray_cycle"], tail["mult"])
                if tail is not None
                else None,
            )
        except InvalidStrategy as exc:
            raise SchemaError(str(exc)) from exc


@dataclass(frozen=True)
class ParallelStrategy:
    """Several searchers started together; a target costs the earliest arrival."""

    branches: tuple[Strategy, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise InvalidStrategy("a parallel strategy needs at least one branch")
        ms = {b.m for b in self.branches}
        if len(ms) != 1:
            raise InvalidStrategy(f"branches disagree on the ray count: {sorted(ms)}")

    @property
    def m(self) -> int:
        return self.branches[0].m

    def __len__(self) -> int:
        return len(self.branches)


StrategyLike = Union[Strategy, ParallelStrategy]


def as_branches(x: StrategyLike) -> tuple[Strategy, ...]:
    return x.branches if isinstance(x, ParallelStrategy) else (x,)


@dataclass(frozen=True)
class RatioReport:
    value: float
    witness: Target
    converged: bool = True
    horizon_used: int = 0
    attained: bool = False

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> dict:
        return {
            "value": "inf" if self.unbounded else self.value,
            "witness": self.witness.to_dict(),
            "converged": self.converged,
            "horizon_used": self.horizon_used,
            "attained": self.attained,
            "unbounded": self.unbounded,
        }


@dataclass(frozen=True)
class TargetInterval:
    """Targets on ``ray`` with distance in ``[lo, hi]`` (``(lo, hi]`` if ``lo_open``)."""

    ray: int
    lo: float
    hi: float = math.inf
    lo_open: bool = False

    @property
    def empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and self.lo_open)


# -- cost of a single target ---------------------------------------------------


def first_hit_cost(X: Strategy, t: Target) -> float:
    """Distance travelled by a unit-speed searcher following ``X`` until it reaches ``t``."""
    travelled = 0.0
    forever = X.rays_searched_forever()
    for i, (x, u) in enumerate(X.iterations()):
        if u == t.ray and x >= t.dist * (1.0 - REL_EPS):
            return 2.0 * travelled + t.dist
        travelled += x
        if i >= len(X.segments) and t.ray not in forever:
            break
    raise NotFound(f"no iteration reaches ray {t.ray} at distance {t.dist}")


def parallel_first_hit_cost(P: StrategyLike, t: Target) -> float:
    best = math.inf
    for branch in as_branches(P):
        try:
            best = min(best, first_hit_cost(branch, t))
        except NotFound:
            continue
    if math.isinf(best):
        raise NotFound(f"no branch reaches ray {t.ray} at distance {t.dist}")
    return best


# -- materialized views used by the evaluators ---------------------------------


@dataclass
class _RayTrack:
    turns: np.ndarray
    before: np.ndarray  # distance travelled outward+back before the iteration, halved
    index: np.ndarray


@dataclass
class _Unrolled:
    tracks: dict[int, _RayTrack]
    n_iter: int


def _unroll(X: Strategy, reach: float) -> _Unrolled:
    """Materialize ``X`` until every ray it searches forever has a turn beyond ``reach``."""
    pending = set(X.rays_searched_forever())
    lists: dict[int, tuple[list, list, list]] = {}
    travelled = 0.0
    n = 0
    for i, (x, u) in enumerate(X.iterations()):
        if i >= len(X.segments) and not pending:
            break
        turns, before, index = lists.setdefault(u, ([], [], []))
        turns.append(x)
        before.append(travelled)
        index.append(i)
        travelled += x
        n = i + 1
        if x > reach * (1.0 + 1e-9):
            pending.discard(u)
    tracks = {
        u: _RayTrack(np.asarray(t, float), np.asarray(b, float), np.asarray(ix, int))
        for u, (t, b, ix) in lists.items()
    }
    return _Unrolled(tracks, n)


def _cover_before(track: Optional[_RayTrack], xs: np.ndarray, strict: bool) -> tuple[np.ndarray, np.ndarray]:
    """Travel before the first visit reaching ``xs`` (strictly beyond if ``strict``).

    Returns ``(before, iteration)``; ``inf`` / ``-1`` where nothing reaches.
    """
    if track is None or track.turns.size == 0:
        return np.full(xs.shape, np.inf), np.full(xs.shape, -1)
    if strict:
        idx = np.searchsorted(track.turns, xs * (1.0 + REL_EPS), side="right")
    else:
        idx = np.searchsorted(track.turns, xs * (1.0 - REL_EPS), side="left")
    ok = idx < track.turns.size
    safe = np.where(ok, idx, 0)
    before = np.where(ok, track.before[safe], np.inf)
    it = np.where(ok, track.index[safe], -1)
    return before, it


def _virtual_cover(tail: GeometricTail, ray: int, x: float, strict: bool) -> float:
    """Travel before ``tail`` (extended to the infinite past) first reaches ``x`` on ``ray``."""
    lam = tail.growth
    best = math.inf
    thr = x * (1.0 + REL_EPS) if strict else x * (1.0 - REL_EPS)
    past = tail.past_sum()
    for c, u in enumerate(tail.ray_cycle):
        if u != ray:
            continue
        y = tail.scale * tail.mult[c] * tail.base**c
        k = math.floor(math.log(thr / y) / math.log(lam))
        # settle rounding of the logarithm
        while y * lam**k > thr or (not strict and y * lam**k >= thr):
            k -= 1
        while not (y * lam**k > thr or (not strict and y * lam**k >= thr)):
            k += 1
        best = min(best, tail.scale * lam**k * (tail.unscaled_sum(c) + past))
    return best


def _default_periods(growth: float) -> int:
    return max(MIN_PERIODS, math.ceil(math.log(HORIZON_GROWTH) / math.log(growth)))


def _reference_distance(branches: Sequence[Strategy], env: StarEnv, intervals: Sequence[TargetInterval]) -> float:
    ref = env.d_min
    for iv in intervals:
        ref = max(ref, iv.lo, iv.hi if math.isfinite(iv.hi) else 0.0)
    for b in branches:
        for x, _ in b.segments:
            ref = max(ref, x)
        if b.tail is not None:
            ref = max(ref, max(b.tail.length(t) for t in range(b.tail.period)))
    return ref


@dataclass
class _Best:
    value: float = -math.inf
    witness: Optional[Target] = None
    attained: bool = False

    def offer(self, value: float, ray: int, dist: float, attained: bool) -> None:
        if value > self.value:
            self.value, self.witness, self.attained = value, Target(ray, dist), attained


def _finite_sup(
    branches: Sequence[Strategy],
    intervals: Sequence[TargetInterval],
    reach: float,
) -> tuple[_Best, int]:
    unrolled = [_unroll(b, reach) for b in branches]
    best = _Best()
    for iv in intervals:
        hi = min(iv.hi, reach)
        turn_xs = [
            u.tracks[iv.ray].turns for u in unrolled if iv.ray in u.tracks
        ]
        xs = np.concatenate(turn_xs) if turn_xs else np.empty(0)
        xs = np.unique(xs[(xs >= iv.lo) & (xs < hi)])
        cands = [(np.asarray([iv.lo]), iv.lo_open, not iv.lo_open), (xs, True, False)]
        for pts, strict, attained in cands:
            if pts.size == 0:
                continue
            before = np.full(pts.shape, np.inf)
            for u in unrolled:
                b, _ = _cover_before(u.tracks.get(iv.ray), pts, strict)
                before = np.minimum(before, b)
            ratios = 1.0 + 2.0 * before / pts
            k = int(np.argmax(ratios))
            best.offer(float(ratios[k]), iv.ray, float(pts[k]), attained)
    return best, max((u.n_iter for u in unrolled), default=0)


def _tail_limits(branches: Sequence[Strategy], iv: TargetInterval, reach: float, best: _Best) -> None:
    for b in branches:
        if b.tail is None:
            continue
        tail = b.tail
        lam = tail.growth
        for c, u in enumerate(tail.ray_cycle):
            if u != iv.ray:
                continue
            x0 = tail.scale * tail.mult[c] * tail.base**c
            cover = min(
                _virtual_cover(o.tail, iv.ray, x0, strict=True)
                for o in branches
                if o.tail is not None and iv.ray in o.tail.ray_cycle
            )
            n = max(0, math.ceil(math.log(reach / x0) / math.log(lam)))
            best.offer(1.0 + 2.0 * cover / x0, iv.ray, x0 * lam**n, False)


def _common_growth(branches: Sequence[Strategy]) -> Optional[float]:
    growths = [b.tail.growth for b in branches if b.tail is not None]
    if not growths:
        return None
    g0 = growths[0]
    if all(abs(g - g0) <= 1e-12 * g0 for g in growths):
        return g0
    return None


def sup_ratio(
    P: StrategyLike,
    env: StarEnv,
    intervals: Iterable[TargetInterval],
    *,
    horizon: Optional[int] = None,
    closed_form: bool = True,
) -> RatioReport:
    """Supremum of ``cost / distance`` over the targets in ``intervals``.

    ``horizon`` is the number of tail periods evaluated term by term before
    the closed-form tail takes over (``closed_form=False`` disables it and
    reports ``converged`` by re-running at twice the horizon).
    """
    branches = as_branches(P)
    intervals = [iv for iv in intervals if not iv.empty]
    if not intervals:
        raise DomainError("no targets to evaluate")
    for iv in intervals:
        if not 0 <= iv.ray < branches[0].m:
            raise DomainError(f"ray {iv.ray} outside [0, {branches[0].m})")
        if iv.lo < env.d_min:
            raise DomainError(f"interval starts at {iv.lo}, below d_min={env.d_min}")

    open_ended = [iv for iv in intervals if math.isinf(iv.hi)]
    for iv in open_ended:
        if not any(iv.ray in b.rays_searched_forever() for b in branches):
            far = max([iv.lo] + [x for b in branches for x, u in b.segments if u == iv.ray])
            return RatioReport(math.inf, Target(iv.ray, 2.0 * far), True, 0, False)

    ref = _reference_distance(branches, env, intervals)
    growths = [b.tail.growth for b in branches if b.tail is not None]
    if open_ended:
        lam = min(growths)
        periods = horizon if horizon is not None else _default_periods(lam)
        reach = ref * lam**periods
    else:
        lam, periods, reach = None, 0, ref

    best, n_iter = _finite_sup(branches, intervals, reach)
    common = _common_growth(branches)
    converged = True
    if open_ended and closed_form and common is not None:
        for iv in open_ended:
            _tail_limits(branches, iv, reach, best)
    elif open_ended:
        again, _ = _finite_sup(branches, intervals, ref * lam ** (2 * periods))
        converged = abs(again.value - best.value) < CONVERGENCE_TOL
    assert best.witness is not None
    return RatioReport(best.value, best.witness, converged, n_iter, best.attained)


def _all_rays(env: StarEnv, rays: Optional[Iterable[int]]) -> list[TargetInterval]:
    chosen = range(env.m) if rays is None else sorted(set(rays))
    return [TargetInterval(u, env.d_min) for u in chosen]


def competitive_ratio(
    X: Strategy,
    env: StarEnv,
    *,
    rays: Optional[Iterable[int]] = None,
    horizon: Optional[int] = None,
    closed_form: bool = True,
) -> RatioReport:
    """Worst case of ``cost / distance`` over targets at distance ``>= env.d_min``.

    ``rays`` restricts the targets to a subset of rays (e.g. the predicted
    ray, for consistency).
    """
    if X.m != env.m:
        raise DomainError(f"strategy has m={X.m}, environment has m={env.m}")
    return sup_ratio(X, env, _all_rays(env, rays), horizon=horizon, closed_form=closed_form)


def parallel_consistency(
    P: StrategyLike,
    env: StarEnv,
    *,
    rays: Optional[Iterable[int]] = None,
    horizon: Optional[int] = None,
    closed_form: bool = True,
) -> RatioReport:
    """Competitive ratio of the parallel strategy (earliest-arrival cost)."""
    branches = as_branches(P)
    if branches[0].m != env.m:
        raise DomainError(f"strategy has m={branches[0].m}, environment has m={env.m}")
    return sup_ratio(P, env, _all_rays(env, rays), horizon=horizon, closed_form=closed_form)


def hit_ratio_sup(X: Strategy, env: StarEnv) -> RatioReport:
    """Supremum of ``cost / distance`` over targets located exactly at turn points.

    For a family of rescaled copies of ``X`` built so that the predicted
    position is a turn point, this is the worst error-free ratio.
    """
    if X.tail is None:
        raise DomainError("hit_ratio_sup needs a strategy with a geometric tail")
    tail = X.tail
    best = _Best()
    for u in sorted(X.rays_searched_forever()):
        lim_max = -math.inf
        for c, ray in enumerate(tail.ray_cycle):
            if ray != u:
                continue
            x0 = tail.scale * tail.mult[c] * tail.base**c
            lim_max = max(lim_max, 1.0 + 2.0 * tail.scale * (tail.unscaled_sum(c) + tail.past_sum()) / x0)
        unrolled = _unroll(X, env.d_min)
        tr = unrolled.tracks[u]
        mask = tr.turns >= env.d_min
        if mask.any():
            ratios = 1.0 + 2.0 * tr.before[mask] / tr.turns[mask]
            k = int(np.argmax(ratios))
            best.offer(float(ratios[k]), u, float(tr.turns[mask][k]), True)
        best.offer(lim_max, u, float(tr.turns[-1]), False)
    assert best.witness is not None
    return RatioReport(best.value, best.witness, True, 0, best.attained)


def cyclic_formula_ratio(lengths: Sequence[float], m: int) -> float:
    """``1 + max_i 2 * sum_{j <= i+m-1} x_j / x_i`` for a cyclic strategy given by its lengths.

    The maximum runs over the indices whose window fits in ``lengths``.
    """
    x = np.asarray(lengths, float)
    if x.size < m:
        raise DomainError(f"need at least m={m} lengths, got {x.size}")
    csum = np.cumsum(x)
    n = x.size - m + 1
    return float(1.0 + np.max(2.0 * csum[m - 1 : m - 1 + n] / x[:n]))


# -- responsibility ---------------------------------------------------------------


@dataclass(frozen=True)
class ResponsibilityReport:
    responsible: dict[tuple[int, int], int]
    bijection: Optional[tuple[int, ...]] = field(default=None)

    @property
    def is_bijection(self) -> bool:
        return self.bijection is not None


def responsibility_map(P: StrategyLike, horizon: int) -> ResponsibilityReport:
    """For every branch and iteration ``<= horizon``, the branch that first finds
    a target just beyond that turn point; ties go to the lowest branch index.

    ``bijection`` is the permutation ``pi`` when each branch ``j`` has a single
    responsible branch ``pi(j)`` for all its turn points, else ``None``.
    """
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    branches = as_branches(P)
    prefixes = []
    for b in branches:
        it = b.iterations()
        segs = []
        for _ in range(horizon + 1):
            try:
                segs.append(next(it))
            except StopIteration:
                break
        prefixes.append(segs)
    reach = max(x for segs in prefixes for x, _ in segs)
    unrolled = [_unroll(b, reach) for b in branches]
    responsible: dict[tuple[int, int], int] = {}
    for j, segs in enumerate(prefixes):
        for i, (x, u) in enumerate(segs):
            pts = np.asarray([x])
            costs = np.asarray([_cover_before(un.tracks.get(u), pts, True)[0][0] for un in unrolled])
            low = costs.min()
            if math.isinf(low):
                continue
            tied = np.flatnonzero(costs <= low * (1.0 + REL_EPS))
            responsible[(j, i)] = int(tied[0])
    pi = []
    for j in range(len(branches)):
        owners = {v for (jj, _), v in responsible.items() if jj == j}
        if len(owners) != 1:
            return ResponsibilityReport(responsible, None)
        pi.append(owners.pop())
    if sorted(pi) != list(range(len(branches))):
        return ResponsibilityReport(responsible, None)
    return ResponsibilityReport(responsible, tuple(pi))
