"""
Tests for Mann weight schedules
"""

import pytest

from ametric_lab.exceptions import InvalidArityError, InvalidParameterError
from ametric_lab.schedules import (
    ScheduleKind,
    build_schedule,
    constant_schedule,
    custom_schedule,
    geometric_schedule,
    harmonic_schedule,
    power_schedule,
)


class TestScheduleFamilies:
    """Test the analytic metadata of each family"""

    def test_constant(self):
        schedule = constant_schedule(3, 0.4)

        assert schedule.alpha_t(17) == 0.4
        assert schedule.diverges
        assert schedule.lower_bound == 0.4

    def test_zero_constant_has_no_lower_bound(self):
        schedule = constant_schedule(3, 0.0)
        assert not schedule.diverges
        assert schedule.lower_bound is None

    def test_harmonic(self):
        schedule = harmonic_schedule(3)

        assert schedule.alpha_t(0) == 0.5
        assert schedule.alpha_t(8) == pytest.approx(0.1)
        assert schedule.diverges
        assert schedule.lower_bound is None

    def test_geometric(self):
        schedule = geometric_schedule(3, 0.5)

        assert schedule.alpha_t(3) == 0.125
        assert not schedule.diverges

    @pytest.mark.parametrize("p,diverges", [(0.5, True), (1.0, True), (2.0, False)])
    def test_power(self, p, diverges):
        schedule = power_schedule(3, p)

        assert schedule.alpha_t(0) == 1.0
        assert schedule.diverges is diverges

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameterError):
            constant_schedule(3, 1.5)
        with pytest.raises(InvalidParameterError):
            geometric_schedule(3, 1.0)
        with pytest.raises(InvalidParameterError):
            power_schedule(3, -1.0)

    def test_arity_one_rejected(self):
        with pytest.raises(InvalidArityError):
            constant_schedule(1, 0.5)


class TestWeights:
    """Test the per-step weight vectors"""

    def test_equal_split(self):
        weights = constant_schedule(3, 0.5).weights(0)
        assert weights.weights == (0.25, 0.25, 0.5)

    def test_weights_sum_to_one(self):
        schedule = harmonic_schedule(7)
        for n in range(50):
            assert sum(schedule.weights(n).weights) == pytest.approx(1.0, abs=1e-12)

    def test_custom_split(self):
        schedule = custom_schedule(
            3,
            alpha=lambda n: 0.5,
            diverges=True,
            lower_bound=0.5,
            split=lambda n, rest: (rest, 0.0),
        )
        assert schedule.weights(4).weights == (0.5, 0.0, 0.5)

    def test_split_length_checked(self):
        schedule = custom_schedule(
            3, alpha=lambda n: 0.5, diverges=True, split=lambda n, rest: (rest,)
        )
        with pytest.raises(InvalidParameterError):
            schedule.weights(0)

    def test_alpha_out_of_range(self):
        schedule = custom_schedule(3, alpha=lambda n: 1.2, diverges=True)
        with pytest.raises(InvalidParameterError):
            schedule.alpha_t(0)


class TestBuildSchedule:
    """Test config-driven construction"""

    def test_kinds(self):
        assert build_schedule("constant", {"alpha": 0.3}, 3).kind is ScheduleKind.CONSTANT
        assert build_schedule("harmonic", {}, 3).kind is ScheduleKind.HARMONIC
        assert build_schedule("geometric", {"r": 0.5}, 3).kind is ScheduleKind.GEOMETRIC
        assert build_schedule("power", {"p": 0.7}, 3).kind is ScheduleKind.POWER

    def test_custom_table_repeats_last_value(self):
        schedule = build_schedule("custom", {"alphas": [1.0, 0.5, 0.25]}, 3)

        assert [schedule.alpha_t(n) for n in range(5)] == [1.0, 0.5, 0.25, 0.25, 0.25]
        assert schedule.lower_bound == 0.25
        assert schedule.diverges

    def test_unknown_kind(self):
        with pytest.raises(InvalidParameterError):
            build_schedule("cosine", {}, 3)

    def test_empty_custom_table(self):
        with pytest.raises(InvalidParameterError):
            build_schedule("custom", {"alphas": []}, 3)
