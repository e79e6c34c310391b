import math

import numpy as np
import pytest

from incentives import (Individual, Instance,
                        OracleConfig, ResourceCapError, concavize_all,
                        exact_dp, exact_enumerate, exact_solve,
                        exact_welfare_per_unit, solve)
from incentives.errors import ConfigError

from conftest import brute_force_optimum, build_instance, random_cent_instance


@pytest.fixture
def single_individual():
    # hull {(0,0),(1,5),(3,9)} as utilities/socials
    return build_instance([(1, [(0, 5.0, 0.0), (1, 4.0, 5.0), (2, 2.0, 9.0)])])


class TestEnumerate:
    def test_worked_example(self, desk_instance):
        welfare, alloc = exact_enumerate(desk_instance, 4.0)
        assert welfare == 13.0
        assert dict(alloc.chosen) == {1: 1, 2: 1}
        assert dict(alloc.incentives) == {(1, 1): 1.0, (2, 1): 2.0}

    def test_budget_zero_defaults(self, desk_instance):
        welfare, alloc = exact_enumerate(desk_instance, 0.0)
        assert welfare == 0.0
        assert dict(alloc.chosen) == {1: 0, 2: 0}

    def test_three_case_hand_enumeration(self, single_individual):
        # options cost 0, 1, 3; budget 2 affords only the 1-euro shift
        welfare, alloc = exact_enumerate(single_individual, 2.0)
        assert welfare == 5.0
        assert dict(alloc.chosen) == {1: 1}

    def test_feasibility_of_reported_allocation(self):
        rng = np.random.default_rng(61)
        for _ in range(20):
            inst = random_cent_instance(rng, n_individuals=int(rng.integers(2, 6)),
                                        max_alts=4)
            budget = round(float(rng.uniform(0, 5)), 2)
            welfare, alloc = exact_enumerate(inst, budget)
            assert math.fsum(alloc.incentives.values()) <= budget + 1e-12
            assert welfare == pytest.approx(brute_force_optimum(inst, budget),
                                            abs=1e-12)

    def test_cap_exceeded(self):
        inst = build_instance([(i, [(a, float(a), float(a)) for a in range(6)])
                               for i in range(30)])  # 6^30 assignments
        with pytest.raises(ResourceCapError):
            exact_enumerate(inst, 1.0)

    def test_negative_budget_rejected(self, desk_instance):
        with pytest.raises(ValueError):
            exact_enumerate(desk_instance, -1.0)


class TestDp:
    def test_matches_enumerate_on_worked_example(self, desk_instance):
        assert exact_dp(desk_instance, 4.0)[0] == 13.0

    def test_budget_between_achievable_spends(self, single_individual):
        welfare, _ = exact_dp(single_individual, 2.5)
        assert welfare == 5.0

    def test_randomized_equivalence_with_enumerate(self):
        rng = np.random.default_rng(67)
        for _ in range(60):
            inst = random_cent_instance(rng, n_individuals=int(rng.integers(2, 7)),
                                        max_alts=4, u_cent_max=200)
            budget = round(float(rng.uniform(0, 6)), 2)
            w_enum, a_enum = exact_enumerate(inst, budget)
            w_dp, a_dp = exact_dp(inst, budget)
            assert w_dp == pytest.approx(w_enum, abs=1e-9)
            assert math.fsum(a_dp.incentives.values()) <= budget + 1e-12

    def test_state_cap(self, desk_instance):
        with pytest.raises(ResourceCapError):
            exact_dp(desk_instance, 4.0, OracleConfig(max_states=3))

    def test_off_grid_weights_round_up(self):
        # weight 0.015 rounds to 2 cents: a 1-cent budget cannot afford it
        inst = build_instance([(1, [(0, 0.015, 0.0), (1, 0.0, 5.0)])])
        assert exact_dp(inst, 0.01)[0] == 0.0
        assert exact_dp(inst, 0.02)[0] == 5.0

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            OracleConfig(weight_scale=0)
        with pytest.raises(ConfigError):
            OracleConfig(mode="branchandbound")

    def test_exact_solve_dispatch(self, desk_instance):
        w_e, _ = exact_solve(desk_instance, 4.0, OracleConfig(mode="enumerate"))
        w_d, _ = exact_solve(desk_instance, 4.0, OracleConfig(mode="dp"))
        assert w_e == 13.0
        assert w_d == pytest.approx(w_e, abs=1e-12)


class TestResultExport:
    def test_same_shape_as_greedy_result_json(self, desk_instance, tmp_path):
        import json
        from incentives.oracle import write_result_json

        welfare, alloc = exact_enumerate(desk_instance, 4.0)
        path = tmp_path / "oracle_result.json"
        write_result_json(welfare, alloc, 4.0, path)
        data = json.loads(path.read_text())
        assert data == {"welfare": 13.0, "budget_given": 4.0,
                        "budget_used": 3.0, "gap_bound": 0.0,
                        "split": None, "iterations": 2}


class TestPerUnitCurve:
    def test_monotone_and_consistent_with_dp(self, desk_instance):
        per_unit = exact_welfare_per_unit(desk_instance, 6.0)
        assert len(per_unit) == 601
        assert np.all(np.diff(per_unit) >= 0)
        for units in (0, 100, 250, 300, 500, 600):
            w, _ = exact_dp(desk_instance, units / 100.0)
            assert per_unit[units] == pytest.approx(w, abs=1e-12)


class TestHullInsensitivity:
    def _hull_restricted(self, instance):
        """The instance reduced to its efficient-frontier alternatives."""
        kept = []
        for ind, profile in zip(instance.individuals,
                                concavize_all(instance)):
            ids = set(profile.alt_ids)
            kept.append(Individual(ind.ind_id, tuple(
                a for a in ind.alternatives if a.alt_id in ids)))
        return Instance(tuple(kept))

    def test_original_at_least_hull_restricted(self):
        rng = np.random.default_rng(71)
        for _ in range(25):
            inst = random_cent_instance(rng, n_individuals=int(rng.integers(2, 6)),
                                        max_alts=5)
            reduced = self._hull_restricted(inst)
            budget = round(float(rng.uniform(0, 5)), 2)
            assert (exact_dp(inst, budget)[0]
                    >= exact_dp(reduced, budget)[0] - 1e-12)

    def test_equality_at_greedy_breakpoint_spends(self):
        # at a spend the greedy reaches exactly, its prefix is optimal
        rng = np.random.default_rng(73)
        for _ in range(15):
            inst = random_cent_instance(rng, n_individuals=int(rng.integers(2, 6)),
                                        max_alts=4)
            ps = concavize_all(inst)
            res = solve(ps, 8.0)
            reduced = self._hull_restricted(inst)
            for spend, welfare in res.curve.breakpoints:
                w_orig, _ = exact_dp(inst, spend)
                w_hull, _ = exact_dp(reduced, spend)
                assert w_orig == pytest.approx(welfare, abs=1e-9)
                assert w_hull == pytest.approx(welfare, abs=1e-9)
