"""Adaptive subset queries against a responder allowed up to H lies.

Candidates are tracked in buckets by how many answers they contradict.
The questioner balances the Berlekamp weight of the two possible
successor states; an exact minimax solver serves as the ground truth
for how many candidates a given (queries, lies) budget can separate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .base_solver import ball_volume
from .errors import DomainError, GameOver

# the exact solver enumerates all query shapes; keep it to small games
MAX_SOLVER_QUERIES = 10
MAX_SOLVER_SHAPES = 200_000


@dataclass(frozen=True)
class LieGameState:
    """``buckets[j]`` holds the candidates that contradict exactly ``j`` answers."""

    buckets: tuple[frozenset[int], ...]
    queries_remaining: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "buckets", tuple(frozenset(b) for b in self.buckets))
        if not self.buckets:
            raise DomainError("need at least one bucket")
        if self.queries_remaining < 0:
            raise DomainError("queries_remaining must be non-negative")
        seen: set[int] = set()
        for b in self.buckets:
            if seen & b:
                raise DomainError("buckets must be pairwise disjoint")
            seen |= b

    @classmethod
    def initial(cls, n: int, lies: int, queries: int) -> "LieGameState":
        if n < 1 or lies < 0:
            raise DomainError(f"bad game size n={n}, lies={lies}")
        return cls((frozenset(range(n)),) + (frozenset(),) * lies, queries)

    @property
    def lies(self) -> int:
        return len(self.buckets) - 1

    def survivors(self) -> list[int]:
        return sorted(itertools.chain.from_iterable(self.buckets))

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.buckets)


def _volumes(q: int, lies: int) -> list[int]:
    """``V[j]`` = patterns of at most ``lies - j`` lies in ``q`` answers; ``V[lies+1] = 0``."""
    return [ball_volume(q, lies - j) for j in range(lies + 1)] + [0]


def weight(state: LieGameState) -> int:
    v = _volumes(state.queries_remaining, state.lies)
    return sum(len(b) * v[j] for j, b in enumerate(state.buckets))


def _split_weights(sizes: tuple[int, ...], counts: tuple[int, ...], q: int) -> tuple[int, int]:
    """Weights after a yes / no answer when ``counts[j]`` members of bucket ``j`` are asked."""
    v = _volumes(q - 1, len(sizes) - 1)
    yes = sum(c * v[j] + (s - c) * v[j + 1] for j, (s, c) in enumerate(zip(sizes, counts)))
    no = sum((s - c) * v[j] + c * v[j + 1] for j, (s, c) in enumerate(zip(sizes, counts)))
    return yes, no


def _best_counts(sizes: tuple[int, ...], q: int) -> tuple[int, ...]:
    """Lexicographically first count vector minimizing ``max(W_yes, W_no)``.

    ``W_yes + W_no`` does not depend on the query, so the optimum puts
    ``W_yes`` as close to half the total as possible. Lower buckets are
    enumerated; the top bucket's count is solved in closed form.
    """
    lies = len(sizes) - 1
    v = _volumes(q - 1, lies)
    w = np.asarray([v[j] - v[j + 1] for j in range(lies + 1)], dtype=np.int64)
    s = np.asarray(sizes, dtype=np.int64)
    base = int(sum(int(s[j]) * v[j + 1] for j in range(lies + 1)))
    total = int(sum(int(s[j]) * (v[j] + v[j + 1]) for j in range(lies + 1)))

    grids = np.meshgrid(*[np.arange(n + 1, dtype=np.int64) for n in sizes[:-1]], indexing="ij")
    prefix = [g.ravel() for g in grids]
    npre = prefix[0].size if prefix else 1
    partial = np.full(npre, base, dtype=np.int64)
    for j, c in enumerate(prefix):
        partial += c * w[j]
    # W_yes = partial + c_top * w_top; pick c_top near (total/2 - partial) / w_top
    wt = int(w[-1])
    top = int(s[-1])
    ideal = np.floor_divide(total - 2 * partial, 2 * wt)
    best_val = None
    best_top = None
    for shift in (0, 1):
        c_top = np.clip(ideal + shift, 0, top)
        yes = partial + c_top * wt
        val = np.maximum(yes, total - yes)
        if best_val is None:
            best_val, best_top = val, c_top
        else:
            better = (val < best_val) | ((val == best_val) & (c_top < best_top))
            best_val = np.where(better, val, best_val)
            best_top = np.where(better, c_top, best_top)
    k = int(np.argmin(best_val))
    return tuple(int(c[k]) for c in prefix) + (int(best_top[k]),)


def _children(sizes: tuple[int, ...], counts: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    lies = len(sizes) - 1
    yes = [0] * (lies + 1)
    no = [0] * (lies + 1)
    for j, (s, c) in enumerate(zip(sizes, counts)):
        yes[j] += c
        no[j] += s - c
        if j < lies:
            yes[j + 1] += s - c
            no[j + 1] += c
    return tuple(yes), tuple(no)


def _shape_count(sizes: tuple[int, ...]) -> int:
    n = 1
    for s in sizes:
        n *= s + 1
    return n


def _winning_balanced_counts(sizes: tuple[int, ...], q: int) -> Optional[tuple[int, ...]]:
    """First weight-minimizing count vector whose successors both stay winnable."""
    if q > MAX_SOLVER_QUERIES or _shape_count(sizes) > MAX_SOLVER_SHAPES or not _wins(sizes, q):
        return None
    target = max(_split_weights(sizes, _best_counts(sizes, q), q))
    for counts in itertools.product(*(range(s + 1) for s in sizes)):
        if max(_split_weights(sizes, counts, q)) != target:
            continue
        if all(_wins(child, q - 1) for child in _children(sizes, counts)):
            return counts
    return None


def ask_next(state: LieGameState) -> Optional[frozenset[int]]:
    """Next subset query, or ``None`` when at most one candidate survives.

    The query takes the lowest-index members of each bucket, in counts
    minimizing the larger successor weight. Among such minimizers, small
    games prefer one that keeps both successors winnable; otherwise the
    lexicographically first count vector is used.
    """
    if len(state.survivors()) <= 1:
        return None
    if state.queries_remaining < 1:
        raise GameOver(f"{len(state.survivors())} candidates survive with no queries left")
    sizes, q = state.sizes(), state.queries_remaining
    counts = _winning_balanced_counts(sizes, q) or _best_counts(sizes, q)
    chosen: set[int] = set()
    for b, c in zip(state.buckets, counts):
        chosen.update(sorted(b)[:c])
    return frozenset(chosen)


def update(state: LieGameState, query: Iterable[int], answer: int) -> LieGameState:
    """Apply ``answer`` (1: the secret is in ``query``) to the state."""
    if state.queries_remaining < 1:
        raise DomainError("no queries remaining")
    q = frozenset(query)
    new: list[set[int]] = [set() for _ in state.buckets]
    for j, bucket in enumerate(state.buckets):
        agree = bucket & q if answer else bucket - q
        new[j] |= agree
        if j + 1 < len(new):
            new[j + 1] |= bucket - agree
    return LieGameState(tuple(frozenset(b) for b in new), state.queries_remaining - 1)


@lru_cache(maxsize=None)
def _wins(sizes: tuple[int, ...], q: int) -> bool:
    if sum(sizes) <= 1:
        return True
    if q == 0:
        return False
    v = _volumes(q, len(sizes) - 1)
    if sum(s * v[j] for j, s in enumerate(sizes)) > 2**q:
        return False  # volume bound
    for counts in itertools.product(*(range(s + 1) for s in sizes)):
        if all(_wins(child, q - 1) for child in _children(sizes, counts)):
            return True
    return False


def can_decode(n: int, queries: int, lies: int) -> bool:
    """Whether an optimal adaptive questioner always isolates the secret among ``n``."""
    if queries > MAX_SOLVER_QUERIES:
        raise DomainError(f"exact solver supports at most {MAX_SOLVER_QUERIES} queries")
    return _wins((n,) + (0,) * lies, queries)


def max_decodable_branches(queries: int, lies: int) -> int:
    """Largest ``n`` such that ``n`` candidates can always be separated."""
    if lies == 0:
        return 2**queries
    n = 1
    while can_decode(n + 1, queries, lies):
        n += 1
    return n
