"""Tests for the core-set MEB machinery and the reference oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.models import PointSet, Center, OutlierInstance, SolverConfig, RunTrace
from src.core import (
    Kernel,
    center_distances,
    solve_meb_dual,
    approx_center,
    badoiu_clarkson,
    farthest_point,
    eval_distance,
    exact_meb,
    exact_meb_outliers_tiny,
    exact_polytope_distance_tiny,
    generate,
)
from src.core.meb_core import coreset_size_bound
from src.utils import RngStream, RefusalError


@st.composite
def small_clouds(draw, d=2):
    """Seeded Gaussian clouds of 3..40 points."""
    n = draw(st.integers(min_value=3, max_value=40))
    seed = draw(st.integers(min_value=0, max_value=2 ** 31 - 1))
    scale = draw(st.floats(min_value=0.1, max_value=100.0))
    return PointSet(np.random.default_rng(seed).normal(scale=scale, size=(n, d)))


class TestKernelDistances:

    def test_explicit_and_combination_agree(self, square):
        combination = Center.combination([0, 3], [0.5, 0.5])
        explicit = Center.explicit([1.0, 1.0])
        np.testing.assert_allclose(
            center_distances(square, combination), center_distances(square, explicit)
        )

    def test_kernel_formula_matches_linear_shortcut(self, gaussian_cloud):
        center = Center.combination([0, 5, 9], [0.2, 0.3, 0.5])
        np.testing.assert_allclose(
            center_distances(gaussian_cloud, center, kernel_formula=True),
            center_distances(gaussian_cloud, center),
            atol=1e-9,
        )

    def test_rbf_point_distances(self, square):
        kernel = Kernel('rbf', 1.0)
        dist = center_distances(square, Center.point(0), kernel)
        assert dist[0] == pytest.approx(0.0, abs=1e-12)
        assert dist[1] == pytest.approx(math.sqrt(2.0 - 2.0 * math.exp(-2.0)))

    def test_rbf_rejects_explicit_center(self, square):
        with pytest.raises(ValueError):
            center_distances(square, Center.explicit([0.0, 0.0]), Kernel('rbf'))

    def test_invalid_kernel(self):
        with pytest.raises(ValueError):
            Kernel('poly')
        with pytest.raises(ValueError):
            Kernel('rbf', 0.0)

    def test_trace_counts_full_pass(self, square):
        trace = RunTrace()
        center_distances(square, Center.point(0), trace=trace)
        center_distances(square, Center.point(0), idx=[1, 2], trace=trace)
        assert trace.points_touched == 6
        assert trace.full_passes == 1


class TestDualSolver:

    def test_two_points(self):
        G = np.array([[0.0, 0.0], [0.0, 4.0]])
        solution = solve_meb_dual(G, tol=1e-12, max_iterations=1000)
        assert solution.radius_lower == pytest.approx(1.0, abs=1e-6)
        np.testing.assert_allclose(solution.weights, [0.5, 0.5], atol=1e-6)
        assert solution.certified

    def test_warm_start_is_padded(self, square):
        G = square.gram(None)
        solution = solve_meb_dual(G, tol=1e-10, max_iterations=10000, weights0=np.array([1.0, 1.0]))
        assert solution.radius_lower == pytest.approx(math.sqrt(2.0), rel=1e-6)


class TestCoreSet:

    def test_approx_center_of_square(self, square):
        center = approx_center(square, [0, 1, 2, 3], 0.01)
        np.testing.assert_allclose(center.to_vector(square), [1.0, 1.0], atol=0.05)

    def test_approx_center_rejects_empty_set(self, square):
        with pytest.raises(ValueError):
            approx_center(square, [], 0.1)

    def test_farthest_point_prefers_lowest_index(self, square):
        index, distance = farthest_point(square, Center.explicit([1.0, 1.0]))
        assert index == 0
        assert distance == pytest.approx(math.sqrt(2.0))

    def test_eval_distance_range(self, square):
        assert eval_distance(square, Center.point(0), 3) == pytest.approx(math.sqrt(8.0))
        with pytest.raises(ValueError):
            eval_distance(square, Center.point(0), 4)

    def test_size_bound(self):
        assert coreset_size_bound(0.1, 1.0 / 3.0) == 31

    def test_ball_covers_and_is_near_optimal(self, gaussian_cloud):
        ball, state = badoiu_clarkson(gaussian_cloud, 0.1)
        optimum = exact_meb(gaussian_cloud).optimum_size
        assert ball.radius >= optimum * (1.0 - 1e-9)
        assert ball.radius <= 1.1 * optimum
        assert np.max(center_distances(gaussian_cloud, ball.center)) <= ball.radius * (1.0 + 1e-12)
        assert len(state.T) <= state.size_cap

    def test_subset_run_only_scans_subset(self, gaussian_cloud):
        trace = RunTrace()
        badoiu_clarkson(gaussian_cloud, 0.2, idx=np.arange(20), trace=trace)
        assert trace.full_passes == 0

    @pytest.mark.parametrize("epsilon,s", [(0.0, 0.3), (1.0, 0.3), (0.1, 1.0)])
    def test_invalid_parameters(self, square, epsilon, s):
        with pytest.raises(ValueError):
            badoiu_clarkson(square, epsilon, s)

    def test_rbf_kernel_ball(self, gaussian_cloud):
        kernel = Kernel('rbf', 2.0)
        ball, _ = badoiu_clarkson(gaussian_cloud, 0.2, kernel=kernel)
        assert not ball.center.is_explicit
        assert np.max(center_distances(gaussian_cloud, ball.center, kernel)) <= ball.radius * (1.0 + 1e-12)
        assert ball.radius <= 1.2 + 1e-9

    @given(points=small_clouds())
    @settings(max_examples=25, deadline=None)
    def test_radius_within_factor_of_exact(self, points):
        epsilon = 0.2
        ball, _ = badoiu_clarkson(points, epsilon)
        optimum = exact_meb(points).optimum_size
        assert optimum * (1.0 - 1e-9) <= ball.radius <= (1.0 + epsilon) * optimum + 1e-12


class TestExactMeb:

    def test_two_points(self):
        result = exact_meb(PointSet(np.array([[0.0, 0.0], [2.0, 0.0]])))
        assert result.optimum_size == pytest.approx(1.0)
        np.testing.assert_allclose(result.optimum_center.vector, [1.0, 0.0], atol=1e-12)
        assert result.method == 'welzl'

    def test_regular_simplex(self):
        points, _, truth = generate('simplex', {'d': 3, 'edge': 1.0}, RngStream(0))
        assert exact_meb(points).optimum_size == pytest.approx(math.sqrt(3.0 / 8.0), rel=1e-9)
        assert truth.optimum_size == pytest.approx(0.612372, abs=1e-6)

    def test_high_dimension_uses_certified_dual(self):
        d = 5
        points = PointSet(np.vstack([np.eye(d), -np.eye(d)]))
        result = exact_meb(points)
        assert result.method == 'dual-gap'
        assert result.optimum_size == pytest.approx(1.0, rel=1e-6)

    def test_single_point(self):
        result = exact_meb(PointSet(np.array([[3.0, 4.0, 5.0]])))
        assert result.optimum_size == pytest.approx(0.0, abs=1e-12)


class TestOutlierOracle:

    def test_drops_the_far_point(self):
        points = PointSet(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [100.0, 100.0]]))
        result = exact_meb_outliers_tiny(OutlierInstance(points, 0.25))
        assert result.optimum_size == pytest.approx(math.sqrt(0.5))
        assert result.subproblems == 4

    def test_subproblem_count(self):
        points = PointSet(np.random.default_rng(1).normal(size=(12, 2)))
        result = exact_meb_outliers_tiny(OutlierInstance(points, 1.0 / 12.0))
        assert result.subproblems == 12

    def test_refuses_above_cap(self):
        config = SolverConfig()
        config.oracle.max_outlier_subsets = 5
        points = PointSet(np.random.default_rng(1).normal(size=(12, 2)))
        with pytest.raises(RefusalError) as info:
            exact_meb_outliers_tiny(OutlierInstance(points, 1.0 / 12.0), config)
        assert info.value.reason == 'budget'


class TestPolytopeOracle:

    def test_single_point(self):
        assert exact_polytope_distance_tiny(PointSet(np.array([[3.0, 4.0]]))).optimum_size == pytest.approx(5.0)

    def test_segment(self):
        result = exact_polytope_distance_tiny(PointSet(np.array([[1.0, 0.0], [0.0, 1.0]])))
        assert result.optimum_size == pytest.approx(math.sqrt(0.5))

    def test_too_many_points(self):
        with pytest.raises(ValueError):
            exact_polytope_distance_tiny(PointSet(np.ones((7, 2))))
