"""
Tests for seeded samplers and tolerance helpers
"""

import numpy as np
import pytest

from ametric_lab.exceptions import InvalidParameterError
from ametric_lab.sampling import GridSampler, PointSampler, iter_chunks
from ametric_lab.tolerance import exceeds, tail_limit_is_zero


class TestPointSampler:
    """Test reproducible uniform draws"""

    def test_shape_and_box(self):
        draws = PointSampler(dim=2, low=-1.0, high=1.0, seed=3).tuples(100, 4)

        assert draws.shape == (100, 4, 2)
        assert draws.min() >= -1.0
        assert draws.max() <= 1.0

    def test_same_seed_same_draws(self):
        a = PointSampler(dim=1, seed=5).tuples(50, 3)
        b = PointSampler(dim=1, seed=5).tuples(50, 3)
        assert np.array_equal(a, b)

    def test_more_samples_only_append(self):
        sampler = PointSampler(dim=2, seed=9)
        assert np.array_equal(sampler.tuples(20, 3), sampler.tuples(40, 3)[:20])
        assert np.array_equal(sampler.weights(20, 3), sampler.weights(40, 3)[:20])

    def test_streams_are_independent(self):
        sampler = PointSampler(dim=1, seed=1)
        assert not np.array_equal(sampler.tuples(10, 2, stream=0), sampler.tuples(10, 2, stream=1))

    def test_anchor_in_first_row(self):
        draws = PointSampler(dim=2, seed=0, anchors=((0.0, 0.0),)).tuples(5, 3)
        assert np.array_equal(draws[0, 0], [0.0, 0.0])

    def test_weights_on_simplex(self):
        weights = PointSampler(dim=1, seed=4).weights(200, 5)

        assert weights.shape == (200, 5)
        assert np.all(weights >= 0.0)
        assert np.allclose(weights.sum(axis=1), 1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [{"dim": 0}, {"dim": 1, "low": 1.0, "high": 1.0}, {"dim": 2, "anchors": ((0.0,),)}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParameterError):
            PointSampler(**kwargs)


class TestGridSampler:
    """Test lexicographic grid enumeration"""

    def test_enumerates_all_pairs(self):
        draws = GridSampler(dim=1, values=(0.0, 1.0, 2.0)).tuples(100, 2)

        assert draws.shape == (9, 2, 1)
        assert draws[0].ravel().tolist() == [0.0, 0.0]
        assert draws[-1].ravel().tolist() == [2.0, 2.0]

    def test_truncated_to_request(self):
        assert len(GridSampler(dim=2, values=(0.0, 1.0)).tuples(5, 3)) == 5

    def test_points_cover_request_beyond_grid_size(self):
        values = (0.0, 1.0, 2.0)
        points = GridSampler(dim=1, values=values, seed=4).points(50, stream=1)

        assert points.shape == (50, 1)
        assert set(points.ravel().tolist()) <= set(values)

    def test_points_are_seeded(self):
        grid = GridSampler(dim=2, values=(0.0, 1.0), seed=8)

        assert np.array_equal(grid.points(30, stream=2), grid.points(30, stream=2))
        assert np.array_equal(grid.points(10, stream=2), grid.points(30, stream=2)[:10])

    def test_empty_grid(self):
        with pytest.raises(InvalidParameterError):
            GridSampler(dim=1, values=())


class TestChunks:
    def test_cover_range(self):
        slices = list(iter_chunks(10, 4))
        assert [(s.start, s.stop) for s in slices] == [(0, 4), (4, 8), (8, 10)]

    def test_empty(self):
        assert list(iter_chunks(0, 4)) == []


class TestTolerance:
    """Test inequality and limit helpers"""

    def test_exceeds_respects_absolute_tolerance(self):
        assert not exceeds(1.0 + 1e-12, 1.0, atol=1e-9, rtol=0.0)
        assert exceeds(1.1, 1.0, atol=1e-9, rtol=0.0)

    def test_exceeds_relative_scale(self):
        assert not exceeds(1e12 + 1.0, 1e12, atol=0.0, rtol=1e-9)

    def test_exceeds_elementwise(self):
        assert exceeds([0.0, 2.0], [1.0, 1.0]).tolist() == [False, True]

    def test_tail_limit(self):
        assert tail_limit_is_zero([1.0, 0.1] + [0.0] * 20)
        assert not tail_limit_is_zero([1.0] * 30)
        assert not tail_limit_is_zero([])

    def test_tail_limit_last_value_counts(self):
        assert not tail_limit_is_zero([0.0] * 19 + [1e-3], window=20, tol=1e-3)
