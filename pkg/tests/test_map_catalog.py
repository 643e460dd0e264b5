from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from contraction_lab.map_catalog import (
    CATALOG_IDS,
    SelfMap,
    apply,
    catalog,
    composite_action,
    iterate,
    resolve_point,
)
from contraction_lab.metric_core import InputError


class TestApply:
    def test_logistic_at_one(self):
        entry = catalog("burton_logistic")
        assert apply(entry.map, F(1, 2)) == F(1, 3)
        assert entry.map(F(1)) == F(1, 2)

    def test_floor_half_at_five(self):
        entry = catalog("floor_half")
        assert apply(entry.map, F(5)) == F(2)

    def test_two_cycle_values(self):
        entry = catalog("period2_counterexample")
        assert apply(entry.map, 0) == 1
        assert apply(entry.map, 1) == 0
        assert apply(entry.map, 2) == 1

    def test_unknown_point(self):
        entry = catalog("period2_counterexample")
        with pytest.raises(InputError):
            apply(entry.map, 9)


class TestIterate:
    def test_zero_steps_is_identity(self):
        entry = catalog("floor_half")
        assert iterate(entry.map, F(37), 0) == F(37)

    def test_two_cycle_returns(self):
        entry = catalog("period2_counterexample")
        assert iterate(entry.map, 0, 2) == 0

    def test_logistic_closed_form(self):
        # x_{k+1} = x_k/(1+x_k) from 1 gives x_k = 1/(k+1); check by direct loop
        entry = catalog("burton_logistic")
        x = F(1)
        for k in range(1, 31):
            x = apply(entry.map, x)
            assert x == F(1, k + 1)
        assert iterate(entry.map, F(1), 3) == F(1, 4)

    @given(st.integers(min_value=0, max_value=12), st.integers(min_value=0, max_value=12))
    def test_iterate_is_a_semigroup_action(self, a, b):
        entry = catalog("floor_half", integer_max=40)
        x = F(37)
        assert iterate(entry.map, x, a + b) == iterate(entry.map, iterate(entry.map, x, a), b)

    def test_negative_count_rejected(self):
        entry = catalog("floor_half")
        with pytest.raises(InputError):
            iterate(entry.map, F(1), -1)


class TestCatalog:
    def test_known_ids(self):
        for entry_id in CATALOG_IDS:
            entry = catalog(entry_id)
            assert entry.id == entry_id

    def test_unknown_id(self):
        with pytest.raises(InputError):
            catalog("does_not_exist")

    def test_composite_tail_values(self):
        entry = catalog("composite")
        assert apply(entry.map, F(4)) == 0
        assert apply(entry.map, F(9)) == F(1, 2)   # 9 = 4*2+1 -> 1 - 1/2
        assert apply(entry.map, F(5)) == 0         # 5 = 4*1+1 -> 1 - 1/1

    def test_composite_rejects_off_space_integers(self):
        with pytest.raises(InputError):
            composite_action(F(7))
        with pytest.raises(InputError):
            composite_action(F(3, 2))

    def test_composite_index_set_starts_at_one(self):
        entry = catalog("composite", grid_step=F(1, 8), index_max=3)
        nums = entry.space.numerators
        assert 4 * 8 in nums and 5 * 8 in nums
        assert 0 in nums and 8 in nums
        assert min(n for n in nums if n > 8) == 32  # no 4n/4n+1 for n = 0

    def test_burton_space_excludes_one(self):
        entry = catalog("burton_logistic", grid_step=F(1, 16))
        pts = entry.space.point_set()
        assert pts[0] == 0 and pts[-1] == F(15, 16)
        assert not entry.space.complete

    def test_truncation_overrides(self):
        entry = catalog("floor_half", integer_max=10)
        assert entry.space.point_set()[-1] == 10

    def test_grid_step_must_divide_one(self):
        with pytest.raises(InputError):
            catalog("burton_logistic", grid_step=F(3, 7))


class TestClosure:
    def test_logistic_images_stay_in_unit_interval(self):
        entry = catalog("burton_logistic", grid_step=F(1, 64))
        for x in entry.space.point_set():
            y = apply(entry.map, x)
            assert 0 <= y < 1

    def test_floor_half_closes_over_sample(self):
        entry = catalog("floor_half", integer_max=64)
        sample = set(entry.space.point_set())
        for x in entry.space.point_set():
            assert apply(entry.map, x) in sample

    def test_composite_images_stay_in_space(self):
        entry = catalog("composite", grid_step=F(1, 16), index_max=5)
        for x in entry.space.point_set():
            y = apply(entry.map, x)
            in_interval = 0 <= y <= 1
            k = int(y)
            in_tail = y == k and k >= 4 and k % 4 in (0, 1)
            assert in_interval or in_tail

    def test_floor_half_fixed_point_unique_by_scan(self):
        entry = catalog("floor_half", integer_max=100)
        fixed = [x for x in entry.space.point_set() if apply(entry.map, x) == x]
        assert fixed == [F(0)]


class TestSelfMapTable:
    def test_table_must_cover_every_point(self):
        entry = catalog("period2_counterexample")
        with pytest.raises(InputError):
            SelfMap(space=entry.space, name="short", table=(1, 0))

    def test_images_must_be_points(self):
        entry = catalog("period2_counterexample")
        with pytest.raises(InputError):
            SelfMap(space=entry.space, name="bad", table=(1, 0, 9))

    def test_json_roundtrip(self):
        entry = catalog("period2_counterexample")
        doc = entry.map.to_json()
        assert doc["map"] == [1, 0, 1]
        back = SelfMap.from_json(doc)
        assert back.table == entry.map.table
        assert back.space == entry.space

    def test_formula_maps_do_not_serialize(self):
        entry = catalog("burton_logistic")
        with pytest.raises(InputError):
            entry.map.to_json()


class TestResolvePoint:
    def test_finite_labels(self):
        entry = catalog("period2_counterexample")
        assert resolve_point(entry.space, "2") == 2

    def test_sampled_rationals(self):
        entry = catalog("burton_logistic")
        assert resolve_point(entry.space, "1/2") == F(1, 2)

    def test_unknown_label(self):
        entry = catalog("period2_counterexample")
        with pytest.raises(InputError):
            resolve_point(entry.space, "9")
