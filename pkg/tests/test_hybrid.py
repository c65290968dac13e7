"""Tests for the radius-or-covering hybrid solvers."""

import math

import numpy as np
import pytest

from src.models import Ball, Center, HybridResult, OutlierInstance, RunTrace
from src.core import center_distances, generate, hybrid_meb, hybrid_meb_outliers, infer_stability
from src.core import hybrid
from src.utils import RngStream


@pytest.fixture
def small_hybrid_config(config):
    config.hybrid.max_rounds = 10
    config.hybrid.repetitions = 2
    return config


class TestThresholds:

    def test_meb_threshold(self):
        assert hybrid.meb_threshold(0.5) == pytest.approx(1.5 / 0.875)

    def test_outlier_radius_error(self):
        expected = 0.09 / (2.0 * (2.0 * math.sqrt(2.0) + math.sqrt(3.0)) ** 2)
        assert hybrid.outlier_radius_error(0.3) == pytest.approx(expected)
        assert hybrid.outlier_radius_error(0.3) == pytest.approx(0.0021637, abs=1e-6)

    def test_radius_ratio_edge_cases(self):
        assert hybrid.radius_ratio(0.0, 0.0) == 1.0
        assert hybrid.radius_ratio(1.0, 0.0) == math.inf
        assert hybrid.radius_ratio(3.0, 2.0) == 1.5

    def test_label_boundary_is_radius_approx(self):
        assert hybrid.label_for(1.2, 1.2) == 'radius-approx'
        assert hybrid.label_for(1.2000001, 1.2) == 'covering-approx'

    def test_rounds_below_the_cap(self, config):
        trace = RunTrace()
        assert hybrid.capped_rounds(0.5, config, trace) == 5
        assert trace.flags == []

    def test_rounds_above_the_cap_are_flagged(self, config):
        trace = RunTrace()
        assert hybrid.capped_rounds(0.3 ** 2 / 2.0, config, trace) == config.hybrid.max_rounds == 40
        assert trace.flags == ['rounds-capped']
        assert trace.notes['uncapped_rounds'] == 46


class TestStabilityInference:

    def _result(self, label: str, ratio: float, variant: str = 'meb') -> HybridResult:
        return HybridResult(Ball(Center.point(0), 1.0), label, ratio, 1.5, epsilon=0.2, variant=variant)

    def test_radius_label_bounds_from_above(self):
        bound = infer_stability(self._result('radius-approx', 1.0), 0.2)
        assert bound.kind == 'upper'
        assert bound.value == pytest.approx(0.2)

    def test_covering_label_bounds_from_below(self):
        bound = infer_stability(self._result('covering-approx', 2.0), 0.2)
        assert bound.kind == 'lower'
        assert bound.value == pytest.approx(0.02)

    def test_outliers_variant_uses_smaller_level(self):
        bound = infer_stability(self._result('covering-approx', 2.0, 'outliers'), 0.2)
        assert bound.value == pytest.approx(hybrid.outlier_radius_error(0.2))

    def test_epsilon_mismatch(self):
        with pytest.raises(ValueError):
            infer_stability(self._result('radius-approx', 1.0), 0.3)

    def test_inconsistent_label_is_rejected(self):
        with pytest.raises(ValueError):
            self._result('covering-approx', 1.0)


class TestRankRadii:

    def test_matches_full_sort(self, gaussian_cloud):
        centers = [Center.point(0), Center.combination([3, 8], [0.5, 0.5])]
        radii, buffer_length = hybrid.rank_radii_one_pass(gaussian_cloud, centers, (150, 100), chunk_size=37)
        assert buffer_length == 101
        for j, center in enumerate(centers):
            dist = np.sort(center_distances(gaussian_cloud, center))
            assert radii[j, 0] == pytest.approx(dist[149])
            assert radii[j, 1] == pytest.approx(dist[99])


class TestHybridMeb:

    def test_label_and_ball_agree(self, small_hybrid_config):
        points, _, _ = generate('uniform-ball', {'n': 300, 'd': 2}, RngStream(5))
        result, report = hybrid_meb(points, 0.5, 0.2, RngStream(1), config=small_hybrid_config)
        assert result.label == hybrid.label_for(result.ratio, hybrid.meb_threshold(0.5))
        assert result.ratio == pytest.approx(result.details['r_o'] / result.details['r_c'])
        if result.label == 'radius-approx':
            assert np.max(center_distances(points, result.ball.center)) <= result.ball.radius * (1.0 + 1e-12)
        assert report.passes == 1
        assert report.result['label'] == result.label
        assert result.stability_bound is not None

    def test_capped_rounds_reach_the_report(self, config):
        config.hybrid.repetitions = 1
        points, _, _ = generate('uniform-ball', {'n': 200, 'd': 2}, RngStream(8))
        _, report = hybrid_meb(points, 0.3, 0.2, RngStream(2), config=config)
        assert 'rounds-capped' in report.flags
        assert report.parameters['rounds'] == 40
        assert report.parameters['recorded']['uncapped_rounds'] == 46

    def test_rejects_bad_parameters(self, square):
        with pytest.raises(ValueError):
            hybrid_meb(square, 1.2, 0.1, RngStream(0))


class TestHybridOutliers:

    def test_ball_covers_its_rank(self, small_hybrid_config):
        points, gamma, truth = generate('planted-outliers', {'n': 300, 'd': 3, 'gamma': 0.05}, RngStream(2))
        inst = OutlierInstance(points, gamma, truth)
        result, report = hybrid_meb_outliers(inst, 0.5, 0.1, RngStream(3), config=small_hybrid_config)
        coverage = int(np.count_nonzero(
            center_distances(points, result.ball.center) <= result.ball.radius * (1.0 + 1e-12)
        ))
        if result.label == 'radius-approx':
            assert coverage >= inst.inlier_count
        else:
            assert coverage >= 255
        assert result.label == hybrid.label_for(result.ratio, hybrid.outliers_threshold(0.5))
        assert report.passes == 1
        assert result.details['candidate_count'] == 20
        assert 'rounds-capped' in report.flags
