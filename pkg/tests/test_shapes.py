"""Tests for shape families and the generalized sampling primitives."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.models import PointSet, Center, RunTrace
from src.core import (
    BallFamily,
    HalfSpaceFamily,
    KBallFamily,
    LineCenter,
    SlabFamily,
    generalized_rank,
    generalized_sandwich,
    generalized_uniform_adaptive,
)
from src.core import generalized
from src.utils import RngStream


@pytest.fixture
def on_axis() -> PointSet:
    """Points at x = 0..4 on the first axis, lifted to y = 0, 1, 0, 3, 0."""
    return PointSet(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0], [3.0, 3.0], [4.0, 0.0]]))


class TestLineCenter:

    def test_through_normalizes(self):
        line = LineCenter.through(np.array([1.0, 1.0]), np.array([4.0, 5.0]))
        np.testing.assert_allclose(line.direction, [0.6, 0.8])
        np.testing.assert_array_equal(line.anchor, [1.0, 1.0])

    def test_coincident_points(self):
        line = LineCenter.through(np.array([2.0, 3.0, 4.0]), np.array([2.0, 3.0, 4.0]))
        np.testing.assert_array_equal(line.direction, [1.0, 0.0, 0.0])


class TestFamilies:

    def test_slab_distances(self, on_axis):
        line = LineCenter(np.zeros(2), np.array([1.0, 0.0]))
        np.testing.assert_allclose(SlabFamily().f_values(on_axis, line), [0.0, 1.0, 0.0, 3.0, 0.0])

    def test_slab_contains_with_slack(self, on_axis):
        line = LineCenter(np.zeros(2), np.array([1.0, 0.0]))
        inside = SlabFamily().contains(on_axis, line, 1.0)
        np.testing.assert_array_equal(inside, [True, True, True, False, True])

    def test_k_balls_use_nearest_center(self, on_axis):
        centers = (Center.explicit([0.0, 0.0]), Center.explicit([4.0, 0.0]))
        np.testing.assert_allclose(
            KBallFamily().f_values(on_axis, centers),
            [0.0, math.sqrt(2.0), 2.0, math.sqrt(10.0), 0.0],
        )

    def test_k_balls_count_one_pass(self, on_axis):
        trace = RunTrace()
        centers = (Center.point(0), Center.point(4))
        KBallFamily().f_values(on_axis, centers, trace=trace)
        assert trace.full_passes == 1
        assert trace.points_touched == 5

    def test_half_space_sign(self, on_axis):
        u = np.array([0.0, 1.0])
        np.testing.assert_allclose(HalfSpaceFamily().f_values(on_axis, u), [0.0, -1.0, 0.0, -3.0, 0.0])
        np.testing.assert_allclose(HalfSpaceFamily(-1.0).f_values(on_axis, u), [0.0, 1.0, 0.0, 3.0, 0.0])

    def test_half_space_size(self):
        family = HalfSpaceFamily()
        assert family.size_from_f(-0.5) == pytest.approx(2.0)
        assert family.size_from_f(0.0) == math.inf
        np.testing.assert_allclose(family.size_from_f(np.array([-2.0, 1.0])), [0.5, np.inf])

    def test_half_space_contains(self, on_axis):
        inside = HalfSpaceFamily().contains(on_axis, np.array([0.0, 1.0]), 1.0)
        np.testing.assert_array_equal(inside, [False, True, False, True, False])

    def test_ball_matches_center_distances(self, on_axis):
        f = BallFamily().f_values(on_axis, Center.explicit([0.0, 0.0]))
        np.testing.assert_allclose(f, np.linalg.norm(on_axis.dense, axis=1))


class TestGeneralizedRank:

    def test_slab_rank(self, on_axis):
        line = LineCenter(np.zeros(2), np.array([1.0, 0.0]))
        Q, size = generalized_rank(on_axis, SlabFamily(), line, 1)
        np.testing.assert_array_equal(Q, [3])
        assert size == pytest.approx(1.0)

    def test_rank_on_subset(self, on_axis):
        line = LineCenter(np.zeros(2), np.array([1.0, 0.0]))
        Q, size = generalized_rank(on_axis, SlabFamily(), line, 1, idx=[0, 1, 2])
        np.testing.assert_array_equal(Q, [1])
        assert size == pytest.approx(0.0)

    def test_half_space_rank(self, on_axis):
        Q, size = generalized_rank(on_axis, HalfSpaceFamily(-1.0), np.array([0.0, 1.0]), 2)
        np.testing.assert_array_equal(Q, [1, 3])
        assert size == math.inf

    def test_debug_witness_passes(self, gaussian_cloud):
        Q, size = generalized_rank(gaussian_cloud, BallFamily(), Center.point(0), 10, debug=True)
        assert Q.size == 10

    def test_rank_out_of_range(self, on_axis):
        with pytest.raises(ValueError):
            generalized_rank(on_axis, BallFamily(), Center.point(0), 5)

    @given(seed=st.integers(min_value=0, max_value=10 ** 6), t=st.integers(min_value=0, max_value=29))
    @settings(max_examples=30, deadline=None)
    def test_excluded_points_are_outside(self, seed, t):
        points = PointSet(np.random.default_rng(seed).normal(size=(30, 2)))
        family = SlabFamily()
        line = LineCenter(np.zeros(2), np.array([0.0, 1.0]))
        Q, size = generalized_rank(points, family, line, t)
        f = family.f_values(points, line)
        assert Q.size == t
        assert np.count_nonzero(f <= size) >= 30 - t
        if t:
            assert np.min(f[Q]) >= size


class TestSampleSizes:

    def test_adaptive_sizes(self):
        assert generalized.adaptive_sample_size(0.1, 0.1) == math.ceil(10 * math.log(10))
        assert generalized.adaptive_pool_size(0.2, 0.1, 100) == 45

    def test_sandwich_sizes(self):
        assert generalized.sandwich_sample_size(0.1, 0.01, 0.1) == math.ceil(1000 * math.log(10))
        assert generalized.sandwich_rank(0.1, 0.01, 1000) == 122


class TestGeneralizedSampling:

    def test_adaptive_pick_is_sublinear(self, gaussian_cloud):
        trace = RunTrace()
        pick = generalized_uniform_adaptive(
            gaussian_cloud, BallFamily(), Center.point(0), 0.1, 0.1, 0.1, RngStream(0), trace=trace
        )
        assert 0 <= pick < gaussian_cloud.n
        assert trace.full_passes == 0
        assert trace.samples['n_prime'] == math.ceil(10 * math.log(10))

    def test_sandwich_needs_small_delta(self, gaussian_cloud):
        with pytest.raises(ValueError):
            generalized_sandwich(gaussian_cloud, BallFamily(), Center.point(0), 0.1, 0.04, 0.1, RngStream(0))

    def test_sandwich_is_a_sampled_distance(self, gaussian_cloud):
        estimate = generalized_sandwich(
            gaussian_cloud, BallFamily(), Center.point(0), 0.3, 0.05, 0.1, RngStream(0)
        )
        dist = BallFamily().f_values(gaussian_cloud, Center.point(0))
        assert np.any(np.isclose(dist, estimate))
