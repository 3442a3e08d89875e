import json
import math

import pytest

from starsearch.errors import DomainError, InvalidStrategy, NotFound, SchemaError
from starsearch.oracle import brute_force_ratio
from starsearch.star_model import StarEnv, Target
from starsearch.strategy_core import (
    GeometricTail,
    ParallelStrategy,
    Strategy,
    TargetInterval,
    competitive_ratio,
    cyclic_formula_ratio,
    first_hit_cost,
    hit_ratio_sup,
    parallel_consistency,
    parallel_first_hit_cost,
    responsibility_map,
    sup_ratio,
)

LINE = StarEnv(2, 1.0)
G2 = Strategy.geometric(2, 2.0)  # 1, 2, 4, ... alternating, ray 0 first

# explicit prefix 1 (ray 0), 5 (ray 1), then 8, 16, 32, ... alternating from ray 0
MIXED = Strategy(2, ((1.0, 0), (5.0, 1)), GeometricTail(2.0, 8.0, (0, 1), (1.0, 1.0)))


class TestFirstHitCost:
    def test_found_on_first_iteration(self):
        assert first_hit_cost(G2, Target(0, 1.0)) == 1.0

    def test_hand_trace(self):
        # ray 0 is reached beyond 1.5 on iteration 2 (length 4) after 1 + 2
        assert first_hit_cost(G2, Target(0, 1.5)) == 2 * (1 + 2) + 1.5

    def test_ray_one(self):
        assert first_hit_cost(G2, Target(1, 3.0)) == 2 * (1 + 2 + 4) + 3.0

    def test_not_found_without_tail(self):
        with pytest.raises(NotFound):
            first_hit_cost(Strategy(2, ((3.0, 0),)), Target(0, 5.0))

    def test_not_found_on_ray_outside_tail(self):
        X = Strategy(2, (), GeometricTail(2.0, 1.0, (0,), (1.0,)))
        with pytest.raises(NotFound):
            first_hit_cost(X, Target(1, 1.0))


class TestParallelCost:
    def test_two_starting_rays(self):
        P = ParallelStrategy((G2, G2.relabeled([1, 0])))
        assert parallel_first_hit_cost(P, Target(1, 1.5)) == 3.5

    def test_single_branch(self):
        t = Target(0, 3.3)
        assert parallel_first_hit_cost(ParallelStrategy((G2,)), t) == first_hit_cost(G2, t)

    def test_no_branch_finds(self):
        with pytest.raises(NotFound):
            parallel_first_hit_cost(ParallelStrategy((Strategy(2, ((1.0, 0),)),)), Target(1, 1.0))


class TestValidation:
    def test_non_increasing_revisit_rejected(self):
        with pytest.raises(InvalidStrategy):
            Strategy(2, ((2.0, 0), (1.0, 1), (2.0, 0)))

    def test_tail_must_exceed_prefix(self):
        with pytest.raises(InvalidStrategy):
            Strategy(2, ((3.0, 0),), GeometricTail(2.0, 1.0, (0, 1), (1.0, 1.0)))

    def test_tail_internal_order(self):
        # slot 1 revisits ray 0 with a shorter length than slot 0
        with pytest.raises(InvalidStrategy):
            Strategy(2, (), GeometricTail(1.1, 1.0, (0, 0), (2.0, 1.0)))

    def test_ray_range(self):
        with pytest.raises(InvalidStrategy):
            Strategy(2, ((1.0, 2),))
        with pytest.raises(InvalidStrategy):
            Strategy(2, (), GeometricTail(2.0, 1.0, (0, 3), (1.0, 1.0)))

    def test_tail_fields(self):
        with pytest.raises(InvalidStrategy):
            GeometricTail(1.0, 1.0, (0,), (1.0,))
        with pytest.raises(InvalidStrategy):
            GeometricTail(2.0, 1.0, (0, 1), (1.0,))

    def test_parallel_requires_common_m(self):
        with pytest.raises(InvalidStrategy):
            ParallelStrategy((G2, Strategy.geometric(3, 1.5)))
        with pytest.raises(InvalidStrategy):
            ParallelStrategy(())


class TestCompetitiveRatio:
    def test_doubling_is_nine(self):
        rep = competitive_ratio(G2, LINE)
        assert rep.value == pytest.approx(9.0, abs=1e-12)
        assert rep.converged and not rep.unbounded
        assert rep.witness.dist >= LINE.d_min

    def test_three_rays(self):
        rep = competitive_ratio(Strategy.geometric(3, 1.5), StarEnv(3))
        assert rep.value == pytest.approx(1 + 2 * 27 / 4, abs=1e-9)

    def test_single_ray_strategy_unbounded(self):
        X = Strategy(2, (), GeometricTail(2.0, 1.0, (0,), (1.0,)))
        rep = competitive_ratio(X, LINE)
        assert rep.unbounded and math.isinf(rep.value)
        assert rep.witness.ray == 1

    def test_finite_prefix_dominates(self):
        # beyond the turn at 1 on ray 0 the next ray-0 visit waits for 1 + 5
        rep = competitive_ratio(MIXED, LINE)
        assert rep.value == pytest.approx(13.0, abs=1e-12)
        assert not rep.attained  # approached from just beyond the turn point
        assert rep.witness == Target(0, 1.0)

    def test_tail_limit_dominates_with_larger_dmin(self):
        # candidates: boundary 7 on ray 0, turns 6.6, 8.5, 8.75, ... -> tail limit 9
        rep = competitive_ratio(MIXED, StarEnv(2, 2.0))
        assert rep.value == pytest.approx(9.0, abs=1e-12)

    def test_boundary_target_is_attained(self):
        # ray 0 is first visited (to 64) after 1 + 50 on ray 1
        X = Strategy(2, ((1.0, 1), (50.0, 1)), GeometricTail(2.0, 64.0, (0, 1), (1.0, 1.0)))
        rep = competitive_ratio(X, StarEnv(2, 2.0))
        assert rep.attained
        assert rep.witness == Target(0, 2.0)
        assert rep.value == pytest.approx(1 + 2 * 51 / 2)

    def test_numeric_path_matches_closed_form(self):
        closed = competitive_ratio(MIXED, StarEnv(2, 2.0))
        numeric = competitive_ratio(MIXED, StarEnv(2, 2.0), closed_form=False)
        assert numeric.converged
        assert numeric.value == pytest.approx(closed.value, abs=1e-9)

    def test_short_horizon_numeric_not_converged(self):
        rep = competitive_ratio(MIXED, StarEnv(2, 2.0), closed_form=False, horizon=3)
        assert not rep.converged
        assert rep.value < 9.0

    def test_restricted_rays(self):
        # ray 1 alone: turns 5, 16, 64, ... plus boundary 3
        rep = competitive_ratio(MIXED, LINE, rays=[1])
        assert rep.value == pytest.approx(9.0, abs=1e-12)

    def test_mismatched_env(self):
        with pytest.raises(DomainError):
            competitive_ratio(G2, StarEnv(3))

    def test_cyclic_formula_cross_check(self):
        for m, b in ((2, 2.0), (3, 1.5), (4, 1.7), (5, 1.2)):
            lengths = [b**i for i in range(400)]
            formula = cyclic_formula_ratio(lengths, m)
            rep = competitive_ratio(Strategy.geometric(m, b), StarEnv(m))
            assert rep.value == pytest.approx(formula, abs=1e-6)

    def test_cyclic_formula_hand_value(self):
        # 1 + 2 (2^30 - 1) / 2^28 at i = 28
        assert cyclic_formula_ratio([2.0**i for i in range(30)], 2) == pytest.approx(9 - 2.0**-27, abs=1e-12)


class TestSupRatio:
    def test_bounded_interval(self):
        # targets on ray 0 within [1, 3]: boundary 1 and the limit beyond turn 1
        rep = sup_ratio(G2, LINE, [TargetInterval(0, 1.0, 3.0)])
        assert rep.value == pytest.approx(7.0)

    def test_open_lower_end(self):
        rep = sup_ratio(G2, LINE, [TargetInterval(0, 1.0, 1.0, lo_open=True), TargetInterval(0, 1.0, 1.0)])
        assert rep.value == 1.0

    def test_below_dmin_rejected(self):
        with pytest.raises(DomainError):
            sup_ratio(G2, LINE, [TargetInterval(0, 0.5)])


class TestParallel:
    def test_two_copies_interleaved(self):
        # turn points on each ray form a ratio-2 grid across branches
        P = ParallelStrategy((G2, G2.relabeled([1, 0])))
        assert parallel_consistency(P, LINE).value == pytest.approx(5.0, abs=1e-12)

    def test_single_branch_equals_competitive_ratio(self):
        assert parallel_consistency(ParallelStrategy((MIXED,)), LINE).value == competitive_ratio(MIXED, LINE).value

    def test_adding_branches_never_hurts(self):
        base = ParallelStrategy((G2,))
        more = ParallelStrategy((G2, G2.scaled(1.5)))
        assert parallel_consistency(more, LINE).value <= parallel_consistency(base, LINE).value


class TestResponsibility:
    def test_two_branches_swap(self):
        P = ParallelStrategy((G2, G2.relabeled([1, 0])))
        rep = responsibility_map(P, 20)
        assert rep.bijection == (1, 0)

    def test_single_branch_identity(self):
        assert responsibility_map(ParallelStrategy((G2,)), 10).bijection == (0,)

    def test_duplicate_branches_fail(self):
        rep = responsibility_map(ParallelStrategy((G2, G2)), 10)
        assert not rep.is_bijection

    def test_horizon_domain(self):
        with pytest.raises(DomainError):
            responsibility_map(ParallelStrategy((G2,)), 0)


def test_hit_ratio_sup_doubling():
    # a target exactly at the j-th turn point costs 1 + 2 (1 - 2^-j)
    rep = hit_ratio_sup(G2, LINE)
    assert rep.value == pytest.approx(3.0, abs=1e-12)


class TestOracle:
    def test_doubling(self):
        v = brute_force_ratio(G2, LINE, 1.0001, 2.0**20)
        assert 9.0 - 1e-3 <= v <= 9.0

    def test_single_point_grid(self):
        # only the boundary targets: ratio 1 on ray 0, 1 + 2 on ray 1
        assert brute_force_ratio(G2, LINE, 1.01, 1.0) == 3.0

    def test_parallel(self):
        P = ParallelStrategy((G2, G2.relabeled([1, 0])))
        v = brute_force_ratio(P, LINE, 1.0001, 2.0**20)
        assert 5.0 - 1e-3 <= v <= 5.0

    def test_domain(self):
        with pytest.raises(DomainError):
            brute_force_ratio(G2, LINE, 1.0, 10.0)
        with pytest.raises(DomainError):
            brute_force_ratio(G2, LINE, 1.1, 0.5)


class TestSerialization:
    def test_roundtrip(self):
        for X in (G2, MIXED, Strategy(3, ((1.0, 2),))):
            doc = json.loads(json.dumps(X.to_dict()))
            assert Strategy.from_dict(doc) == X

    def test_document_shape(self):
        assert G2.to_dict() == {
            "m": 2,
            "segments": [],
            "tail": {"base": 2.0, "scale": 1.0, "ray_cycle": [0, 1], "mult": [1.0, 1.0]},
        }

    @pytest.mark.parametrize(
        "doc",
        [
            {"m": 2, "segments": [{"len": -1, "ray": 0}], "tail": None},
            {"m": 2, "segments": [{"len": 1}], "tail": None},
            {"m": 1, "segments": [], "tail": None},
            {"m": 2, "segments": [], "tail": {"base": 0.5, "scale": 1, "ray_cycle": [0], "mult": [1]}},
            {"m": 2, "segments": [{"len": 2, "ray": 0}, {"len": 1, "ray": 0}], "tail": None},
            [],
        ],
    )
    def test_rejects(self, doc):
        with pytest.raises(SchemaError):
            Strategy.from_dict(doc)

    def test_report_dict(self):
        d = competitive_ratio(G2, LINE).to_dict()
        assert d["value"] == pytest.approx(9.0)
        assert set(d) == {"value", "witness", "converged", "horizon_used", "attained", "unbounded"}
