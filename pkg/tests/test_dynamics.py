from fractions import Fraction as F

import pytest

from contraction_lab.dynamics import (
    certify_fixed_point,
    check_distinct_iterates,
    check_perimeter_decrease,
    detect_period2,
    enumerate_fixed_points,
    geometric_decay_check,
    picard_orbit,
)
from contraction_lab.classify import estimate_large_tpc_modulus
from contraction_lab.map_catalog import SelfMap, apply, catalog
from contraction_lab.metric_core import FiniteMetricSpace, InputError, perimeter


def line_space(coords):
    coords = [F(c) for c in coords]
    table = tuple(tuple(abs(a - b) for b in coords) for a in coords)
    return FiniteMetricSpace(points=tuple(range(len(coords))), dist_table=table)


class TestPicardOrbit:
    def test_logistic_orbit_closed_form(self):
        entry = catalog("burton_logistic")
        trace = picard_orbit(entry.map, F(1), max_steps=200)
        assert trace.halted_by == "budget"
        assert len(trace.states) == 201
        for n, state in enumerate(trace.states):
            assert state == F(1, n + 1)
        assert trace.orbit_bound == F(200, 201)
        assert trace.residual == F(1, 201) - F(1, 202)

    def test_states_follow_the_map(self):
        entry = catalog("composite", grid_step=F(1, 16), index_max=4)
        trace = picard_orbit(entry.map, F(9), max_steps=12)
        for n in range(len(trace.states) - 1):
            assert trace.states[n + 1] == apply(entry.map, trace.states[n])
        for n in range(len(trace.states) - 2):
            assert trace.perimeters[n] == perimeter(
                entry.space, trace.states[n], trace.states[n + 1], trace.states[n + 2])

    def test_two_cycle_halt_from_2(self):
        entry = catalog("period2_counterexample")
        trace = picard_orbit(entry.map, 2, max_steps=16)
        assert trace.halted_by == "period-2"
        assert trace.states == (2, 1, 0, 1, 0)
        assert trace.period2_entry == 1
        assert trace.perimeters == (F(4), F(2), F(2))
        assert trace.orbit_bound == 2

    def test_two_cycle_halt_from_0(self):
        entry = catalog("period2_counterexample")
        trace = picard_orbit(entry.map, 0, max_steps=16)
        assert trace.states == (0, 1, 0, 1)
        assert trace.orbit_bound == 1

    def test_fixed_start_halts_immediately(self):
        entry = catalog("floor_half")
        trace = picard_orbit(entry.map, F(0), max_steps=8)
        assert trace.halted_by == "fixed-point"
        assert trace.states == (F(0),)
        assert trace.residual == 0

    def test_halving_orbit_reaches_zero(self):
        entry = catalog("floor_half")
        trace = picard_orbit(entry.map, F(256), max_steps=64)
        assert trace.halted_by == "fixed-point"
        assert trace.final_state == 0
        assert len(trace.states) == 10  # 256 halves to 0 in 9 steps

    def test_budget_too_small_rejected(self):
        entry = catalog("floor_half")
        with pytest.raises(InputError):
            picard_orbit(entry.map, F(8), max_steps=1)

    def test_halt_disabled_runs_to_budget(self):
        entry = catalog("period2_counterexample")
        trace = picard_orbit(entry.map, 2, max_steps=20, halt_on_period2=False)
        assert trace.halted_by == "budget"
        assert len(trace.states) == 21


class TestPerimeterDecrease:
    def test_logistic_orbit_strictly_decreases(self):
        entry = catalog("burton_logistic")
        trace = picard_orbit(entry.map, F(1), max_steps=50)
        ok, idx, _ = check_perimeter_decrease(trace)
        assert ok and idx is None
        # direct form on this orbit: P_n = 2 (x_n - x_{n+2})
        for n in range(len(trace.perimeters)):
            assert trace.perimeters[n] == 2 * (trace.states[n] - trace.states[n + 2])

    def test_two_cycle_fails_where_perimeter_plateaus(self):
        entry = catalog("period2_counterexample")
        trace = picard_orbit(entry.map, 2, max_steps=16)
        ok, idx, detail = check_perimeter_decrease(trace)
        assert not ok and idx == 1
        assert "P_2" in detail and "P_1" in detail

    def test_fixed_start_is_vacuous_pass(self):
        entry = catalog("floor_half")
        trace = picard_orbit(entry.map, F(0), max_steps=8)
        ok, idx, detail = check_perimeter_decrease(trace)
        assert ok and "vacuous" in detail

    def test_short_budget_trace_rejected(self):
        entry = catalog("burton_logistic")
        trace = picard_orbit(entry.map, F(1), max_steps=2)
        with pytest.raises(InputError):
            check_perimeter_decrease(trace)


class TestDistinctIterates:
    def test_logistic_orbit_distinct(self):
        entry = catalog("burton_logistic")
        trace = picard_orbit(entry.map, F(1), max_steps=40)
        ok, wit, _ = check_distinct_iterates(trace)
        assert ok and wit is None

    def test_two_cycle_repeats(self):
        entry = catalog("period2_counterexample")
        trace = picard_orbit(entry.map, 0, max_steps=16)
        ok, wit, detail = check_distinct_iterates(trace)
        assert not ok and wit == (0, 2)
        assert "x_0" in detail

    def test_constant_map_passes_via_fixed_point_exception(self):
        space = line_space([0, 1, 5])
        const = SelfMap(space=space, name="const", table=(1, 1, 1))
        trace = picard_orbit(const, 0, max_steps=8)
        assert trace.halted_by == "fixed-point"
        ok, _, _ = check_distinct_iterates(trace)
        assert ok


class TestDetectPeriod2:
    def test_two_cycle_points(self):
        entry = catalog("period2_counterexample")
        assert detect_period2(entry.space, entry.map) == (0, 1)

    def test_halving_map_has_none(self):
        entry = catalog("floor_half")
        assert detect_period2(entry.space, entry.map) == ()

    def test_logistic_map_has_none(self):
        entry = catalog("burton_logistic", grid_step=F(1, 64))
        assert detect_period2(entry.space, entry.map) == ()


class TestCertifyFixedPoint:
    def test_zero_is_fixed_for_logistic(self):
        entry = catalog("burton_logistic")
        cert = certify_fixed_point(entry.map, F(0))
        assert cert is not None and cert.residual == 0 and cert.tolerance == 0

    def test_zero_is_fixed_for_halving(self):
        entry = catalog("floor_half")
        assert certify_fixed_point(entry.map, F(0)) is not None

    def test_two_cycle_rejects_everywhere(self):
        entry = catalog("period2_counterexample")
        for x in entry.space.point_set():
            assert certify_fixed_point(entry.map, x) is None

    def test_tolerance_certificate(self):
        entry = catalog("burton_logistic")
        cert = certify_fixed_point(entry.map, F(1, 1000), tol=F(1, 100))
        assert cert is not None and cert.residual <= F(1, 100)


class TestEnumerateFixedPoints:
    def test_two_cycle_has_none(self):
        entry = catalog("period2_counterexample")
        assert enumerate_fixed_points(entry.space, entry.map) == ()

    def test_halving_has_only_zero(self):
        entry = catalog("floor_half")
        assert enumerate_fixed_points(entry.space, entry.map) == (F(0),)

    def test_identity_fixes_everything(self):
        space = line_space([0, 1, 2])
        identity = SelfMap(space=space, name="id", table=(0, 1, 2))
        assert enumerate_fixed_points(space, identity) == (0, 1, 2)

    def test_non_closing_sample_rejected(self):
        entry = catalog("burton_logistic", grid_step=F(1, 16))
        with pytest.raises(InputError):
            enumerate_fixed_points(entry.space, entry.map)


class TestGeometricDecay:
    def test_logistic_orbit_satisfies_bound(self):
        entry = catalog("burton_logistic")
        table, _ = estimate_large_tpc_modulus(entry.space, entry.map)
        trace = picard_orbit(entry.map, F(1), max_steps=200)
        diag = geometric_decay_check(trace, table, F(1, 4))
        assert not diag.vacuous
        assert diag.ok and diag.violations == ()
        # every listed pair genuinely qualifies
        for r in diag.records:
            assert r.separation >= F(1, 4)
            assert r.separation <= r.perimeter  # d(x_m,x_n) <= P(x_{m+1},x_m,x_n)

    def test_no_qualifying_pairs_is_vacuous_pass(self):
        entry = catalog("burton_logistic")
        table, _ = estimate_large_tpc_modulus(entry.space, entry.map)
        trace = picard_orbit(entry.map, F(1, 2), max_steps=30)
        diag = geometric_decay_check(trace, table, F(3))
        assert diag.vacuous and diag.ok

    def test_two_cycle_orbit_eventually_violates_bound(self):
        entry = catalog("period2_counterexample")
        table, _ = estimate_large_tpc_modulus(entry.space, entry.map)
        trace = picard_orbit(entry.map, 2, max_steps=24, halt_on_period2=False)
        diag = geometric_decay_check(trace, table, F(1, 2))
        assert not diag.ok
        first = diag.violations[0]
        assert first.perimeter > first.bound
        # separated pairs persist forever while the bound decays geometrically
        assert any(r.n >= 3 for r in diag.violations)

    def test_uncovered_eps_rejected(self):
        entry = catalog("period2_counterexample")
        table, _ = estimate_large_tpc_modulus(entry.space, entry.map, eps_grid=(F(1),))
        with pytest.raises(InputError):
            geometric_decay_check(
                picard_orbit(entry.map, 2, max_steps=8), table, F(1, 2))

    def test_long_traces_use_a_deterministic_stride(self):
        entry = catalog("burton_logistic")
        table, _ = estimate_large_tpc_modulus(entry.space, entry.map)
        trace = picard_orbit(entry.map, F(1), max_steps=700)
        diag1 = geometric_decay_check(trace, table, F(1, 4))
        diag2 = geometric_decay_check(trace, table, F(1, 4))
        assert diag1.records == diag2.records
        assert diag1.ok
        sampled_n = {r.n for r in diag1.records}
        assert all(n % 2 == 0 for n in sampled_n)  # stride 2 at 700 states

    def test_delta_lookup_steps_down(self):
        entry = catalog("period2_counterexample")
        table, _ = estimate_large_tpc_modulus(
            entry.space, entry.map, eps_grid=(F(1, 8), F(1, 2), F(1)))
        trace = picard_orbit(entry.map, 2, max_steps=8, halt_on_period2=False)
        diag = geometric_decay_check(trace, table, F(1, 2))
        assert diag.delta_eps == F(1, 8)  # largest grid value <= (1/2)/3
        assert diag.delta == F(1, 2)


class TestTraceSerialization:
    def test_json_fields(self):
        entry = catalog("period2_counterexample")
        doc = picard_orbit(entry.map, 2, max_steps=16).to_json()
        assert doc["states"] == [2, 1, 0, 1, 0]
        assert doc["halted_by"] == "period-2"
        assert doc["perimeters"] == ["4", "2", "2"]

    def test_csv_layout(self):
        entry = catalog("burton_logistic")
        text = picard_orbit(entry.map, F(1), max_steps=4).to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "n,x_n,step_dist,perimeter"
        assert len(lines) == 6
        assert lines[1].startswith("0,1.0,")
        assert lines[-1].split(",")[2] == ""  # no step distance at the last state
