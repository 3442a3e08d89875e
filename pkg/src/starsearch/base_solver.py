"""Closed-form search constants, the robust-base root finder, binomial tails."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

BISECTION_TOL = 1e-12
MAX_EXACT_N = 64


def rho_star(m: int) -> float:
    """``m^m / (m-1)^(m-1)``; the optimal geometric constant (1 for m=1)."""
    if m < 1:
        raise DomainError(f"rho_star needs m >= 1, got {m}")
    if m == 1:
        return 1.0
    return m**m / (m - 1) ** (m - 1)


def r_star(m: int) -> float:
    return 1.0 + 2.0 * rho_star(m)


def optimal_base(m: int) -> float:
    if m < 2:
        raise DomainError(f"optimal base needs m >= 2, got {m}")
    return m / (m - 1)


def geometric_ratio(m: int, b: float) -> float:
    """Competitive ratio ``1 + 2 b^m / (b - 1)`` of the cyclic geometric strategy."""
    if not b > 1:
        raise DomainError(f"base must exceed 1, got {b}")
    return 1.0 + 2.0 * b**m / (b - 1.0)


@dataclass(frozen=True)
class SearchConstants:
    m: int
    rho_star: float
    r_star: float
    b_opt: float

    @classmethod
    def for_rays(cls, m: int) -> "SearchConstants":
        rho = rho_star(m)
        return cls(m=m, rho_star=rho, r_star=1.0 + 2.0 * rho, b_opt=optimal_base(m))


def _check_robustness(m: int, r: float) -> None:
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    rs = r_star(m)
    if r < rs * (1.0 - 1e-12):
        raise DomainError(f"r={r} is below the optimal ratio r*_{m}={rs}")


def rho_r(r: float, m: int = 2) -> float:
    _check_robustness(m, r)
    return (r - 1.0) / 2.0


def solve_base(m: int, r: float) -> float:
    """Largest ``b > 1`` with ``b^m / (b - 1) == (r - 1) / 2``.

    ``f(b) = b^m/(b-1)`` is convex on ``b > 1`` with its minimum at
    ``m/(m-1)``, so bisection on ``[m/(m-1), rho_r + 1]`` finds the larger
    root. At ``r == r*_m`` the root is double and ``m/(m-1)`` is returned.
    """
    rho = rho_r(r, m)
    lo = optimal_base(m)
    if lo**m / (lo - 1.0) >= rho:
        return lo
    hi = rho + 1.0
    # b^m/(b-1) >= b^(m-1) >= rho+1 at b = rho+1, so hi brackets the root
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if mid**m / (mid - 1.0) < rho:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def binom_tail(n: int, m: int) -> int:
    """Exact ``sum_{j=0}^{m} C(n, j)``."""
    if n < 0 or m < 0:
        raise DomainError(f"binom_tail needs non-negative arguments, got ({n}, {m})")
    if m > n:
        raise DomainError(f"binom_tail needs m <= n, got ({n}, {m})")
    if n > MAX_EXACT_N:
        raise DomainError(f"binom_tail supports n <= {MAX_EXACT_N}, got {n}")
    return sum(math.comb(n, j) for j in range(m + 1))


def ball_volume(n: int, radius: int) -> int:
    """Number of length-``n`` error patterns of weight ``<= radius`` (clamped)."""
    if radius < 0:
        return 0
    return binom_tail(n, min(radius, n))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"entropy argument must lie in [0, 1], got {x}")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def entropy_sandwich(n: int, m: int) -> tuple[float, float]:
    """Entropy bounds ``(lower, upper)`` bracketing ``binom_tail(n, m)``.

    Valid for ``0 < m < n/2``.
    """
    if not (0 < m and 2 * m < n):
        raise DomainError(f"entropy sandwich needs 0 < m < n/2, got ({n}, {m})")
    upper = 2.0 ** (n * binary_entropy(m / n))
    lower = upper / math.sqrt(8.0 * m * (1.0 - m / n))
    return lower, upper
