"""
Tests for convex structures and the convexity checker
"""

import numpy as np
import pytest

from ametric_lab.ametric_core import example_space
from ametric_lab.convexity import (
    ConvexStructure,
    WeightVector,
    check_convexity,
    combine,
    corner_cases,
    first_slot_structure,
    is_in_convex_box,
    weighted_mean_structure,
)
from ametric_lab.exceptions import InputShapeError, InvalidArityError, InvalidWeightsError
from ametric_lab.sampling import PointSampler


class TestWeightVector:
    """Test weight validation"""

    def test_exact_weights_kept(self):
        weights = (0.1, 0.2, 0.7)
        assert WeightVector(weights).weights == weights

    def test_small_drift_renormalized(self):
        vector = WeightVector((0.5, 0.5 + 5e-10))
        assert sum(vector.weights) == pytest.approx(1.0, abs=1e-15)

    def test_sum_too_far_rejected(self):
        with pytest.raises(InvalidWeightsError):
            WeightVector((0.5, 0.6))

    def test_negative_rejected(self):
        with pytest.raises(InvalidWeightsError):
            WeightVector((-0.1, 1.1))

    def test_basis_and_uniform(self):
        assert WeightVector.basis(3, 1).weights == (0.0, 1.0, 0.0)
        assert WeightVector.uniform(4).arity == 4


class TestWeightedMean:
    """Test the coordinatewise weighted mean"""

    def test_two_points(self):
        W = weighted_mean_structure(2)
        assert combine(W, [0.0, 10.0], (0.3, 0.7))[0] == pytest.approx(7.0)

    def test_basis_weight_selects_point(self):
        W = weighted_mean_structure(3, 2)
        points = [(1.0, 2.0), (3.0, 4.0), (5.0, 6.0)]
        assert np.array_equal(combine(W, points, WeightVector.basis(3, 2)), np.array([5.0, 6.0]))

    @pytest.mark.parametrize("alpha", [0.0, 0.1, 0.3, 0.5, 0.77, 1.0])
    def test_arity_two_matches_classical_update(self, alpha):
        """t = 2 gives (1 - a) x + a y bit for bit"""
        x, y = 1.2345678, -9.87654321
        combined = combine(weighted_mean_structure(2), [x, y], (1.0 - alpha, alpha))[0]
        assert combined == (1.0 - alpha) * x + alpha * y

    def test_weight_count_mismatch(self):
        with pytest.raises(InputShapeError):
            combine(weighted_mean_structure(3), [0.0, 1.0, 2.0], (0.5, 0.5))

    def test_point_count_mismatch(self):
        with pytest.raises(InputShapeError):
            combine(weighted_mean_structure(3), [0.0, 1.0], (0.2, 0.3, 0.5))

    def test_arity_one_rejected(self):
        with pytest.raises(InvalidArityError):
            weighted_mean_structure(1)

    def test_from_function(self):
        def mean(points, weights):
            return sum(w * p for p, w in zip(points, weights))

        W = ConvexStructure.from_function(mean, arity=3, dim=1)
        assert combine(W, [0.0, 3.0, 6.0], (0.2, 0.3, 0.5))[0] == pytest.approx(3.9)


class TestCheckConvexity:
    """Test the sampled convexity inequality"""

    @pytest.mark.parametrize("t", [2, 3, 4, 5])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_weighted_mean_is_convex(self, t, d):
        report = check_convexity(
            example_space(t, d),
            weighted_mean_structure(t, d),
            PointSampler(dim=d, seed=t + d),
            10_000,
        )

        assert report.passed
        assert report.samples_checked == 10_000 + 2 * t + 3

    def test_corner_case_count(self):
        rng = np.random.default_rng(0)
        u, x, w = corner_cases(rng.normal(size=(2, 1)), rng.normal(size=(3, 1)), 3)

        assert u.shape == (9, 2, 1)
        assert x.shape == (9, 3, 1)
        assert np.allclose(w.sum(axis=1), 1.0)

    def test_first_slot_structure_fails(self):
        report = check_convexity(
            example_space(3), first_slot_structure(3), PointSampler(dim=1, seed=1), 1000
        )

        assert not report.passed
        violation = report.violations[0]
        assert violation.lhs > violation.rhs
        assert set(violation.to_dict()) == {"index", "u", "x", "weights", "lhs", "rhs"}

    def test_structure_mismatch(self):
        with pytest.raises(InputShapeError):
            check_convexity(
                example_space(3), weighted_mean_structure(4), PointSampler(dim=1), 10
            )


class TestConvexBox:
    """Test membership of combinations in a box"""

    def test_combination_stays_in_box(self):
        W = weighted_mean_structure(3, 2)
        points = [(0.0, 1.0), (1.0, 0.5), (0.25, 0.0)]
        assert is_in_convex_box(W, points, (0.2, 0.5, 0.3), 0.0, 1.0)

    def test_box_rejects_outside_points(self):
        W = weighted_mean_structure(2)
        assert not is_in_convex_box(W, [2.0, 3.0], (0.5, 0.5), 0.0, 1.0)
