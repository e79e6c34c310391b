import json
import math

import numpy as np
import pytest

from incentives import (Alternative, Individual, Instance, InstanceError,
                        default_alternative, incentive_weights, load_instance,
                        save_instance)

from conftest import build_instance, random_cent_instance


class TestDefaultAlternative:
    def test_unique_max_utility(self):
        ind = Individual(1, (Alternative(0, 5.0, 0.0), Alternative(1, 3.0, 10.0)))
        d = default_alternative(ind)
        assert d.alt_id == 0
        assert d.default_utility == 5.0
        assert d.default_social == 0.0

    def test_utility_ties_break_to_larger_social(self):
        ind = Individual(1, (Alternative(0, 5.0, 0.0), Alternative(1, 5.0, 10.0)))
        assert default_alternative(ind).alt_id == 1

    def test_full_ties_break_to_lowest_id(self):
        ind = Individual(1, (Alternative(0, 5.0, 4.0), Alternative(1, 5.0, 4.0)))
        assert default_alternative(ind).alt_id == 0

    def test_invariant_under_permutation(self):
        rng = np.random.default_rng(7)
        alts = [Alternative(a, float(u), float(s))
                for a, (u, s) in enumerate(zip(rng.integers(0, 5, 12),
                                               rng.integers(0, 5, 12)))]
        reference = default_alternative(Individual(1, tuple(alts)))
        for _ in range(20):
            perm = rng.permutation(len(alts))
            shuffled = Individual(1, tuple(alts[k] for k in perm))
            assert default_alternative(shuffled) == reference


class TestIncentiveWeights:
    def test_direct_subtraction(self):
        ind = Individual(1, (Alternative(0, 5.0, 0.0), Alternative(1, 3.0, 1.0),
                             Alternative(2, 1.0, 2.0)))
        weights = {w.alt_id: w.weight for w in incentive_weights(ind)}
        assert weights == {0: 0.0, 1: 2.0, 2: 4.0}

    def test_indifference_all_zero(self):
        ind = Individual(1, (Alternative(0, 2.0, 0.0), Alternative(1, 2.0, 1.0),
                             Alternative(2, 2.0, 5.0)))
        assert all(w.weight == 0.0 for w in incentive_weights(ind))

    def test_weight_is_exact_compensation(self):
        # paying the weight makes the shifted alternative match the default
        ind = Individual(1, (Alternative(0, 5.0, 0.0), Alternative(1, 3.0, 10.0)))
        w1 = incentive_weights(ind)[1].weight
        assert w1 == 2.0
        assert 3.0 + w1 == 5.0

    def test_nonnegative_and_zero_on_default(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            inst = random_cent_instance(rng, n_individuals=1, max_alts=8)
            ind = inst.individuals[0]
            d = default_alternative(ind)
            for w in incentive_weights(ind):
                assert w.weight >= 0.0
                if w.alt_id == d.alt_id:
                    assert w.weight == 0.0

    def test_translation_invariance(self):
        ind = Individual(1, (Alternative(0, 5.25, 0.0), Alternative(1, 3.75, 10.0),
                             Alternative(2, 1.5, 4.0)))
        base = incentive_weights(ind)
        for c in (1.37, -2.5, 100.0):
            shifted = Individual(1, tuple(
                Alternative(a.alt_id, a.utility + c, a.social)
                for a in ind.alternatives))
            assert default_alternative(shifted).alt_id == default_alternative(ind).alt_id
            for w0, w1 in zip(base, incentive_weights(shifted)):
                assert w1.weight == pytest.approx(w0.weight, abs=1e-9)


class TestInstanceValidation:
    def test_empty_individual_rejected(self):
        with pytest.raises(InstanceError, match="no alternatives"):
            Instance((Individual(1, ()),))

    def test_duplicate_alt_id_rejected(self):
        with pytest.raises(InstanceError, match="duplicate alternative"):
            Instance((Individual(1, (Alternative(0, 1.0, 0.0),
                                     Alternative(0, 2.0, 0.0))),))

    def test_duplicate_ind_id_rejected(self):
        ind = Individual(1, (Alternative(0, 1.0, 0.0),))
        with pytest.raises(InstanceError, match="duplicate individual"):
            Instance((ind, ind))

    def test_non_finite_rejected(self):
        with pytest.raises(InstanceError, match="non-finite utility"):
            Instance((Individual(1, (Alternative(0, math.inf, 0.0),)),))
        with pytest.raises(InstanceError, match="non-finite social"):
            Instance((Individual(1, (Alternative(0, 0.0, math.nan),)),))

    def test_columns_layout(self, desk_instance):
        cols = desk_instance.columns
        assert cols.offsets.tolist() == [0, 3, 5]
        assert cols.ind_ids.tolist() == [1, 2]
        assert cols.utilities.tolist() == [5.0, 4.0, 2.0, 3.0, 1.0]
        assert not cols.utilities.flags.writeable

    def test_metadata_copied_and_readonly(self):
        meta = {"source": "unit"}
        inst = build_instance([(1, [(0, 1.0, 0.0)])], metadata=meta)
        meta["source"] = "changed"
        assert inst.metadata["source"] == "unit"
        with pytest.raises(TypeError):
            inst.metadata["source"] = "nope"


class TestCsvRoundTrip:
    def test_minimal_file(self, tmp_path):
        p = tmp_path / "inst.csv"
        p.write_text("ind_id,alt_id,utility,social\n1,0,5.0,0.0\n1,1,3.0,10.0\n")
        inst = load_instance(p)
        assert inst.n_individuals == 1
        assert inst.individuals[0].alternatives == (
            Alternative(0, 5.0, 0.0), Alternative(1, 3.0, 10.0))

    def test_round_trip_identity(self, tmp_path):
        rng = np.random.default_rng(11)
        inst = random_cent_instance(rng, n_individuals=20)
        p = tmp_path / "inst.csv"
        save_instance(inst, p)
        assert load_instance(p) == inst

    def test_interleaved_rows_grouped_by_first_appearance(self, tmp_path):
        p = tmp_path / "inst.csv"
        p.write_text("ind_id,alt_id,utility,social\n"
                     "2,0,1.0,0.0\n1,0,5.0,0.0\n2,1,0.5,3.0\n1,1,3.0,10.0\n")
        inst = load_instance(p)
        assert [ind.ind_id for ind in inst.individuals] == [2, 1]
        assert [len(ind.alternatives) for ind in inst.individuals] == [2, 2]

    def test_round_trip_with_labels(self, tmp_path):
        inst = Instance((Individual(1, (Alternative(0, 1.0, 0.0, "car"),
                                        Alternative(1, 0.5, 2.0, None))),))
        p = tmp_path / "inst.csv"
        save_instance(inst, p)
        assert load_instance(p) == inst

    def test_duplicate_row_reports_line(self, tmp_path):
        p = tmp_path / "dup.csv"
        p.write_text("ind_id,alt_id,utility,social\n1,0,5.0,0.0\n1,0,3.0,1.0\n")
        with pytest.raises(InstanceError, match=r"line 3: duplicate alternative"):
            load_instance(p)

    def test_non_finite_reports_line(self, tmp_path):
        p = tmp_path / "inf.csv"
        p.write_text("ind_id,alt_id,utility,social\n1,0,inf,0.0\n")
        with pytest.raises(InstanceError, match=r"line 2: non-finite utility"):
            load_instance(p)
        p.write_text("ind_id,alt_id,utility,social\n1,0,1.0,nan\n")
        with pytest.raises(InstanceError, match=r"line 2: non-finite social"):
            load_instance(p)

    def test_parse_error_reports_line(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("ind_id,alt_id,utility,social\n1,0,abc,0.0\n")
        with pytest.raises(InstanceError, match=r"line 2: cannot parse utility"):
            load_instance(p)

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "hdr.csv"
        p.write_text("a,b,c,d\n1,0,1.0,0.0\n")
        with pytest.raises(InstanceError, match="bad header"):
            load_instance(p)


class TestJsonRoundTrip:
    def test_round_trip_with_metadata(self, tmp_path):
        inst = build_instance([(1, [(0, 1.25, 0.5)]), (2, [(0, 0.0, 0.0), (1, -1.0, 3.0)])],
                              metadata={"source": "unit", "units": "eur/kg"})
        p = tmp_path / "inst.json"
        save_instance(inst, p)
        back = load_instance(p)
        assert back == inst
        assert dict(back.metadata) == dict(inst.metadata)

    def test_schema_shape(self, tmp_path):
        inst = build_instance([(1, [(0, 1.0, 0.0)])])
        p = tmp_path / "inst.json"
        save_instance(inst, p)
        data = json.loads(p.read_text())
        assert data["individuals"][0]["id"] == 1
        assert data["individuals"][0]["alternatives"][0] == {
            "id": 0, "utility": 1.0, "social": 0.0}

    def test_empty_individual_rejected(self, tmp_path):
        p = tmp_path / "empty.json"
        p.write_text('{"individuals": [{"id": 1, "alternatives": []}]}')
        with pytest.raises(InstanceError, match="no alternatives"):
            load_instance(p)

    def test_invalid_json_rejected(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{"individuals": [')
        with pytest.raises(InstanceError, match="invalid JSON"):
            load_instance(p)

    def test_unknown_format_rejected(self, tmp_path):
        p = tmp_path / "inst.txt"
        p.write_text("x")
        with pytest.raises(InstanceError, match="cannot infer format"):
            load_instance(p)
