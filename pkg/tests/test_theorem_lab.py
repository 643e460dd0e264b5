from fractions import Fraction as F

import pytest

from contraction_lab.map_catalog import SelfMap, apply, catalog
from contraction_lab.metric_core import FiniteMetricSpace, InputError
from contraction_lab.theorem_lab import (
    SearchConfig,
    minimize_refutation,
    random_instance,
    run_validation,
    search_refutations,
    seeded_counterexample,
    verdict,
)


def line_instance(coords, images):
    coords = [F(c) for c in coords]
    table = tuple(tuple(abs(a - b) for b in coords) for a in coords)
    space = FiniteMetricSpace(points=tuple(range(len(coords))), dist_table=table)
    return space, SelfMap(space=space, name="test", table=tuple(images))


class TestVerdicts:
    def test_uncorrected_statement_refuted_by_two_cycle(self):
        space, mapping = seeded_counterexample()
        v = verdict("mesmouli_uncorrected", space, mapping, x0=0)
        assert v.status == "refuted"
        assert v.hypotheses_pass
        assert v.fixed_points == ()
        assert v.fixed_point_exists == "fail"
        names = [h.name for h in v.hypotheses]
        assert names == ["large_tpc", "bounded_orbit"]

    def test_corrected_statement_inapplicable_on_two_cycle(self):
        space, mapping = seeded_counterexample()
        v = verdict("corrected_main", space, mapping, x0=0)
        assert v.status == "inapplicable"
        period_hyp = [h for h in v.hypotheses if h.name == "no_period2"][0]
        assert period_hyp.status == "fail"
        # the recorded witnesses really are period-2 points
        for w in period_hyp.witness:
            x = int(w)
            assert apply(mapping, apply(mapping, x)) == x and apply(mapping, x) != x

    def test_corrected_hypothesis_list(self):
        space, mapping = seeded_counterexample()
        v = verdict("corrected_main", space, mapping, x0=0)
        assert [h.name for h in v.hypotheses] == ["large_tpc", "no_period2",
                                                  "bounded_orbit"]

    def test_petrov_inapplicable_on_two_cycle(self):
        space, mapping = seeded_counterexample()
        v = verdict("petrov", space, mapping, x0=0)
        assert v.status == "inapplicable"
        assert [h.name for h in v.hypotheses] == ["uniform_tpc", "no_period2"]

    def test_burton_inapplicable_on_two_cycle(self):
        space, mapping = seeded_counterexample()
        v = verdict("burton", space, mapping, x0=0)
        assert v.status == "inapplicable"  # pairwise contraction fails at (0,1)

    def test_corrected_confirmed_on_halving_map(self):
        entry = catalog("floor_half")
        v = verdict("corrected_main", entry.space, entry.map, x0=F(256))
        assert v.status == "confirmed"
        assert v.fixed_points == (F(0),)
        assert v.count_le_two == "pass"
        assert v.scope_qualified

    def test_burton_confirmed_on_strict_contraction(self):
        space, mapping = line_instance([0, 1, 3], [0, 0, 0])
        v = verdict("burton", space, mapping, x0=2)
        assert v.status == "confirmed"
        assert v.unique == "pass"

    def test_two_fixed_points_refute_uniqueness_claims(self):
        # 0 and 1 fixed, 3 -> 0: strict perimeter contraction, no 2-cycles
        space, mapping = line_instance([0, 1, 3], [0, 1, 0])
        v = verdict("mesmouli_uncorrected", space, mapping, x0=0)
        assert v.hypotheses_pass
        assert v.fixed_points == (0, 1)
        assert v.status == "refuted"          # claims a unique fixed point
        assert v.unique == "fail"
        v2 = verdict("corrected_main", space, mapping, x0=0)
        assert v2.status == "confirmed"       # allows up to two
        v3 = verdict("petrov", space, mapping, x0=0)
        assert v3.status == "confirmed"

    def test_petrov_confirmed_on_halving_map(self):
        entry = catalog("floor_half", integer_max=64)
        v = verdict("petrov", entry.space, entry.map, x0=F(64))
        assert v.status == "confirmed"
        assert v.unique == "not-claimed"
        assert v.count_le_two == "pass"

    def test_incomplete_space_is_inapplicable(self):
        entry = catalog("burton_logistic", grid_step=F(1, 64))
        v = verdict("corrected_main", entry.space, entry.map, x0=F(1, 2))
        assert v.status == "inapplicable"
        assert any("not complete" in note for note in v.notes)

    def test_unknown_theorem_rejected(self):
        space, mapping = seeded_counterexample()
        with pytest.raises(InputError):
            verdict("banach", space, mapping, x0=0)

    def test_json_shape(self):
        space, mapping = seeded_counterexample()
        doc = verdict("mesmouli_uncorrected", space, mapping, x0=0).to_json()
        assert doc["status"] == "refuted"
        assert doc["conclusion"]["fixed_points"] == []
        assert doc["conclusion"]["unique"] == "fail"
        assert {h["name"] for h in doc["hypotheses"]} == {"large_tpc", "bounded_orbit"}


class TestRandomInstances:
    def test_deterministic_per_trial(self):
        cfg = SearchConfig(seed=1, trials=5)
        a_space, a_map = random_instance(cfg, 0)
        b_space, b_map = random_instance(cfg, 0)
        assert a_space == b_space and a_map.table == b_map.table

    def test_different_trials_differ(self):
        cfg = SearchConfig(seed=1, trials=5)
        a_space, _ = random_instance(cfg, 0)
        b_space, _ = random_instance(cfg, 1)
        assert a_space != b_space

    def test_instances_are_valid_metrics_with_total_maps(self):
        cfg = SearchConfig(seed=3, trials=150)
        for t in range(cfg.trials):
            space, mapping = random_instance(cfg, t)
            assert 3 <= space.size <= 12
            assert space.validate().ok
            assert len(mapping.table) == space.size
            for img in mapping.table:
                assert img in space.points

    def test_trial_index_bound(self):
        cfg = SearchConfig(seed=1, trials=2)
        with pytest.raises(InputError):
            random_instance(cfg, 2)

    def test_size_range_validation(self):
        with pytest.raises(InputError):
            SearchConfig(seed=1, trials=1, size_min=2)
        with pytest.raises(InputError):
            SearchConfig(seed=1, trials=1, size_min=5, size_max=4)

    def test_biased_maps_contain_a_two_cycle(self):
        cfg = SearchConfig(seed=11, trials=30, map_bias="period2")
        for t in range(cfg.trials):
            space, mapping = random_instance(cfg, t)
            has_cycle = any(
                mapping.table[space.index(mapping.table[i])] == space.points[i]
                and mapping.table[i] != space.points[i]
                for i in range(space.size))
            assert has_cycle


class TestSearch:
    def test_seeded_counterexample_always_hits(self):
        cfg = SearchConfig(seed=123, trials=5)
        findings = search_refutations("mesmouli_uncorrected", cfg)
        assert findings.hits >= 1
        assert findings.refutations[0].trial == -1

    def test_corrected_statement_survives_search(self):
        cfg = SearchConfig(seed=123, trials=300)
        findings = search_refutations("corrected_main", cfg)
        assert findings.hits == 0
        assert findings.hypothesis_pass_trials > 0

    def test_biased_search_finds_fresh_refutations(self):
        cfg = SearchConfig(seed=7, trials=60, map_bias="period2")
        findings = search_refutations("mesmouli_uncorrected", cfg)
        assert any(r.trial >= 0 for r in findings.refutations)

    def test_search_restricted_to_refutable_statements(self):
        cfg = SearchConfig(seed=1, trials=1)
        with pytest.raises(InputError):
            search_refutations("burton", cfg)

    def test_findings_serialize_and_reverify(self):
        cfg = SearchConfig(seed=7, trials=60, map_bias="period2")
        findings = search_refutations("mesmouli_uncorrected", cfg)
        doc = findings.to_json()
        assert doc["hits"] == findings.hits
        # round-trip a refutation and re-verify it still refutes
        ref = findings.refutations[-1]
        mapping = SelfMap.from_json(ref.to_json()["instance"])
        again = verdict("mesmouli_uncorrected", mapping.space, mapping,
                        x0=mapping.space.points[0])
        assert again.status == "refuted"


class TestMinimize:
    def test_three_point_instance_is_already_minimal(self):
        space, mapping = seeded_counterexample()
        m_space, m_map = minimize_refutation(space, mapping)
        assert m_space.size == 3
        assert m_map.table == mapping.table

    def test_padded_instance_shrinks_to_core(self):
        # the 2-cycle on {0,1,2} padded with faraway points mapping into it
        space, mapping = line_instance([0, 1, 2, 10, 20, 30],
                                       [1, 0, 1, 1, 1, 1])
        v = verdict("mesmouli_uncorrected", space, mapping, x0=0)
        assert v.status == "refuted"
        m_space, m_map = minimize_refutation(space, mapping)
        assert m_space.size == 3
        assert {0, 1} <= set(m_space.points)  # the 2-cycle itself survives
        again = verdict("mesmouli_uncorrected", m_space, m_map,
                        x0=m_space.points[0])
        assert again.status == "refuted"

    def test_non_refuting_input_rejected(self):
        space, mapping = line_instance([0, 1, 3], [0, 0, 0])
        with pytest.raises(InputError):
            minimize_refutation(space, mapping)


class TestValidationSweep:
    def test_small_sweep_has_no_violations(self):
        out = run_validation(SearchConfig(seed=505, trials=250))
        assert out["corrected_conclusion_violations"] == []
        assert out["petrov_count_violations"] == []
        assert out["burton_uniqueness_violations"] == []
        assert out["orbit_halt_violations"] == []
        assert out["halt_membership_violations"] == []
        assert out["perimeter_decrease_violations"] == []
        assert out["pair_domination_violations"] == []
        assert out["perimeter_third_violations"] == []
        # the sweep is not vacuous
        assert out["corrected_hypotheses_pass"] > 0
        assert out["large_contraction_pass"] > 0
        assert out["orbits_checked"] > 0
