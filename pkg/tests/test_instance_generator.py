"""Tests for the synthetic instance families."""

import math

import numpy as np
import pytest

from src.core import FAMILIES, FAMILY_DEFAULTS, exact_meb, generate
from src.models import PointSet
from src.utils import RngStream


class TestRegistry:

    def test_every_family_has_defaults(self):
        assert set(FAMILIES) == set(FAMILY_DEFAULTS)

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            generate('spiral', {}, RngStream(0))

    def test_unknown_parameter(self):
        with pytest.raises(ValueError):
            generate('simplex', {'n': 5}, RngStream(0))

    def test_none_values_keep_defaults(self):
        points, _, truth = generate('simplex', {'d': None}, RngStream(0))
        assert points.d == FAMILY_DEFAULTS['simplex']['d']
        assert truth.extra['params']['edge'] == 1.0

    def test_same_seed_same_points(self):
        a, _, _ = generate('planted-outliers', {'n': 50, 'd': 2}, RngStream(9))
        b, _, _ = generate('planted-outliers', {'n': 50, 'd': 2}, RngStream(9))
        assert a.digest() == b.digest()


class TestBallFamilies:

    def test_simplex(self):
        points, gamma, truth = generate('simplex', {'d': 4, 'edge': 2.0}, RngStream(0))
        assert points.n == 5 and gamma == 0.0
        assert truth.optimum_size == pytest.approx(2.0 * math.sqrt(4.0 / 10.0))
        edges = np.linalg.norm(points.dense[:, None, :] - points.dense[None, :, :], axis=2)
        np.testing.assert_allclose(edges[np.triu_indices(5, 1)], 2.0)

    def test_uniform_ball_truth_is_the_oracle(self):
        points, _, truth = generate('uniform-ball', {'n': 100, 'd': 2}, RngStream(1))
        assert truth.optimum_size == pytest.approx(exact_meb(points).optimum_size)
        assert truth.optimum_size <= 1.0 + 1e-9

    def test_planted_outliers(self):
        points, gamma, truth = generate('planted-outliers', {'n': 100, 'd': 3, 'gamma': 0.05}, RngStream(2))
        assert gamma == 0.05
        assert truth.inlier_indices.size == 95
        inliers = PointSet(points.rows_dense(truth.inlier_indices))
        assert exact_meb(inliers).optimum_size == pytest.approx(truth.optimum_size, rel=1e-9)
        dist = np.linalg.norm(points.dense - truth.optimum_center, axis=1)
        outliers = np.setdiff1d(np.arange(100), truth.inlier_indices)
        assert np.all(dist[outliers] >= 1.1 * 10.0 * truth.optimum_size * (1.0 - 1e-12))

    def test_satellite(self):
        points, gamma, truth = generate('satellite', {'n': 200, 'd': 2, 'fraction': 0.05}, RngStream(3))
        assert gamma == 0.0
        assert len(truth.extra['satellite_indices']) == 10
        assert 0.0 < truth.extra['removal_shrink'] < 1.0
        assert truth.extra['core_radius'] < truth.optimum_size


class TestMarginFamilies:

    def test_one_class_margin(self):
        points, _, truth = generate('one-class-margin', {'n': 100, 'd': 3, 'gamma': 0.1, 'rho': 2.0}, RngStream(4))
        u = np.asarray(truth.extra['normal'])
        heights = points.inner(u)
        inliers = truth.inlier_indices
        outliers = np.setdiff1d(np.arange(100), inliers)
        assert inliers.size == 90
        assert np.min(heights[inliers]) == pytest.approx(2.0)
        assert np.all(heights[outliers] < 0.0)
        assert truth.optimum_size == pytest.approx(0.5)

    def test_two_class_margin(self):
        points, _, truth = generate(
            'two-class-margin', {'n': 101, 'd': 2, 'gamma': 0.1, 'width': 1.0}, RngStream(5)
        )
        labels = np.asarray(truth.extra['labels'])
        assert np.count_nonzero(labels == 1) == 50
        assert np.count_nonzero(labels == -1) == 51
        heights = points.inner(np.asarray(truth.extra['normal']))
        inlier = np.zeros(101, dtype=bool)
        inlier[truth.inlier_indices] = True
        assert np.all(heights[inlier & (labels == 1)] >= 0.5 - 1e-12)
        assert np.all(heights[inlier & (labels == -1)] <= -0.5 + 1e-12)
        assert np.all(heights[~inlier & (labels == 1)] < 0.0)
        assert np.all(heights[~inlier & (labels == -1)] > 0.0)
        assert truth.optimum_size == 1.0


class TestShapeFamilies:

    def test_line_with_noise(self):
        points, _, truth = generate('line-with-noise', {'n': 100, 'd': 3, 'gamma': 0.1}, RngStream(6))
        anchor = np.asarray(truth.extra['anchor'])
        direction = np.asarray(truth.extra['direction'])
        diff = points.dense - anchor
        perp = np.linalg.norm(diff - np.outer(diff @ direction, direction), axis=1)
        assert np.max(perp[truth.inlier_indices]) == pytest.approx(truth.optimum_size)
        outliers = np.setdiff1d(np.arange(100), truth.inlier_indices)
        assert np.all(perp[outliers] > truth.optimum_size)

    def test_line_needs_two_dimensions(self):
        with pytest.raises(ValueError):
            generate('line-with-noise', {'n': 10, 'd': 1}, RngStream(0))

    def test_k_clusters(self):
        points, _, truth = generate('k-clusters', {'n': 120, 'd': 2, 'k': 3, 'gamma': 0.05}, RngStream(7))
        centers = np.asarray(truth.extra['centers'])
        assert centers.shape == (3, 2)
        assert truth.optimum_size == pytest.approx(max(truth.extra['cluster_radii']))
        inliers = points.rows_dense(truth.inlier_indices)
        nearest = np.min(np.linalg.norm(inliers[:, None, :] - centers[None, :, :], axis=2), axis=1)
        assert np.all(nearest <= 1.0 + 1e-12)

    def test_k_clusters_need_enough_inliers(self):
        with pytest.raises(ValueError):
            generate('k-clusters', {'n': 2, 'k': 3, 'gamma': 0.0}, RngStream(0))

    @pytest.mark.parametrize("gamma", [-0.1, 1.0])
    def test_gamma_range(self, gamma):
        with pytest.raises(ValueError):
            generate('planted-outliers', {'n': 10, 'gamma': gamma}, RngStream(0))
