"""Property suites run by ``starsearch verify``.

Each check returns a :class:`CheckResult`; tolerances can be scaled to
exercise the failure path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import advice_model as adv
from . import directional_model as dirm
from . import positional_model as pos
from .base_solver import binom_tail, r_star, rho_star, solve_base
from .errors import TooFewBranches
from .oracle import brute_force_ratio
from .randomgen import random_strategy
from .star_model import ErrorKind, StarEnv
from .strategy_core import Strategy, competitive_ratio, responsibility_map

SUITES = ("core", "advice", "directional", "positional")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def _advice_pairs():
    for H in (1, 2):
        for k in range(1, 9):
            if 2 * H > k:
                continue
            if 2**k // binom_tail(k, H) >= 2:
                yield k, H


def check_core(tol: float, seed: int) -> list[CheckResult]:
    out = []
    worst = 0.0
    for m in range(2, 7):
        b = m / (m - 1)
        v = competitive_ratio(Strategy.geometric(m, b), StarEnv(m)).value
        worst = max(worst, abs(v - (1 + 2 * rho_star(m))))
    out.append(CheckResult("core", "optimal geometric ratio", worst <= 1e-6 * tol, f"max error {worst:.3g}"))

    rng = np.random.default_rng(seed)
    below = over = 0.0
    for _ in range(50):
        case = random_strategy(rng)
        exact = competitive_ratio(case.strategy, case.env).value
        bf = brute_force_ratio(case.strategy, case.env, 1.0001, case.max_dist())
        below = max(below, exact - bf)
        over = max(over, bf - exact)
    ok = below <= 1e-3 * tol and over <= 1e-12 * tol
    out.append(CheckResult("core", "brute force vs analytic", ok, f"max gap {below:.3g}, max excess {over:.3g}"))
    return out


def check_advice(tol: float, seed: int) -> list[CheckResult]:
    out = []
    for rule in ("floor", "decodable"):
        failing = []
        for k, H in _advice_pairs():
            try:
                cfg = adv.AdviceFamilyConfig(9.0, k, H, branch_rule=rule)
            except TooFewBranches:
                continue
            if adv.protocol_failures(cfg):
                failing.append(f"(k={k},H={H},p={adv.branch_count(cfg)})")
        out.append(
            CheckResult(
                "advice",
                f"lie-tolerant decoding, {rule} branch count",
                not failing,
                "all patterns decode" if not failing else "fails at " + " ".join(failing),
            )
        )

    worst_c = worst_r = 0.0
    bij = True
    for r in (9.0, 10.0, 15.0):
        for k in (1, 2, 3, 4):
            cfg = adv.AdviceFamilyConfig(r, k)
            P = adv.build_advice_family(cfg)
            worst_c = max(worst_c, abs(adv.measured_consistency(cfg).value - adv.consistency_bound(cfg)))
            worst_r = max(worst_r, max(competitive_ratio(b, StarEnv()).value for b in P.branches) - r)
            bij &= responsibility_map(P, 50).is_bijection
    out.append(CheckResult("advice", "family consistency meets bound", worst_c <= 1e-4 * tol, f"max error {worst_c:.3g}"))
    out.append(CheckResult("advice", "branch robustness within r", worst_r <= 1e-6 * tol, f"max excess {worst_r:.3g}"))
    out.append(CheckResult("advice", "responsibility is a bijection", bij, "horizon 50"))
    return out


def check_directional(tol: float, seed: int) -> list[CheckResult]:
    out = []
    worst = 0.0
    for m in range(2, 9):
        for b in (m / (m - 1), 1.3, 2.0):
            for d in (1.0, 2.0, 5.0, 20.0):
                cfg = dirm.BiasedConfig(m, b, d)
                mc, mr = dirm.measured_biased(cfg)
                bc, br = dirm.biased_bounds(cfg)
                worst = max(worst, abs(mc.value - bc), abs(mr.value - br))
    out.append(CheckResult("directional", "biased closed forms", worst <= 1e-6 * tol, f"max error {worst:.3g}"))

    deltas = (2.0, 4.0, 8.0, 16.0)
    rows = [dirm.weak_directional_ratios(dirm.WeakDirectionalConfig(7, 1, d)) for d in deltas]
    floor = 1 + 2 * rho_star(3)
    gaps = [u - floor for u, _ in rows]
    halving = [gaps[i] / gaps[i + 1] for i in range(len(gaps) - 1)]
    ok = all(abs(h - 2.0) <= 0.2 * tol for h in halving)
    out.append(CheckResult("directional", "weak gap halves as delta doubles", ok, " ".join(f"{h:.4f}" for h in halving)))
    growth = [rows[i + 1][1] / rows[i][1] for i in range(len(rows) - 1)]
    ok = all(abs(g - 2.0) <= 0.2 * tol for g in growth)
    out.append(CheckResult("directional", "weak robustness ratio tracks delta ratio", ok, " ".join(f"{g:.4f}" for g in growth)))
    above_floor = all(u >= floor - 1e-6 * tol for u, _ in rows)
    out.append(CheckResult("directional", "weak ratio above window floor", above_floor, f"floor {floor:.6g}"))
    return out


def check_positional(tol: float, seed: int) -> list[CheckResult]:
    out = []
    worst_c = worst_r = 0.0
    for m in range(2, 7):
        for r in (r_star(m), r_star(m) + 2, 2 * r_star(m)):
            b = solve_base(m, r)
            worst_c = max(worst_c, abs(pos.family_consistency(m, r).value - (1 + 2 / (b - 1))))
            for d in (1.0, 3.3, 17.0):
                X = pos.build_positional(pos.PositionalConfig(m, r, d, m - 1))
                worst_r = max(worst_r, competitive_ratio(X, StarEnv(m)).value - r)
    out.append(CheckResult("positional", "consistency meets lower bound", worst_c <= 1e-6 * tol, f"max error {worst_c:.3g}"))
    out.append(CheckResult("positional", "robustness within r", worst_r <= 1e-9 * tol, f"max excess {worst_r:.3g}"))

    for kind in (ErrorKind.POSITIVE, ErrorKind.NEGATIVE):
        excess = -np.inf
        for H in (0.1, 0.5, 1.0):
            cfg = pos.PositionalConfig(2, 9.0, 10.0, 0, H)
            X = pos.build_weak_positional(cfg)
            v = pos.ratio_under_error(X, cfg.prediction, kind, H).value
            excess = max(excess, v - pos.weak_bound(cfg))
        out.append(
            CheckResult(
                "positional",
                f"tolerant strategy, {kind.value} errors within bound",
                excess <= 1e-4 * tol,
                f"max excess {excess:.4g}",
            )
        )
    return out


_SUITE_FUNCS: dict[str, Callable[[float, int], list[CheckResult]]] = {
    "core": check_core,
    "advice": check_advice,
    "directional": check_directional,
    "positional": check_positional,
}


def run_suites(names: list[str], tol_scale: float = 1.0, seed: int = 0) -> list[CheckResult]:
    results = []
    for name in names:
        results.extend(_SUITE_FUNCS[name](tol_scale, seed))
    return results
