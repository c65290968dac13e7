"""Tests for the MEB solvers on stable instances."""

import math

import numpy as np
import pytest

from src.models import Center, PointSet, RadiusInterval, RunTrace
from src.core import center_distances, exact_meb, generate, meb_alg1, meb_alg2, radius_range
from src.core import stable_meb
from src.utils import RngStream


@pytest.fixture
def ball_instance() -> PointSet:
    points, _, _ = generate('uniform-ball', {'n': 400, 'd': 3}, RngStream(21))
    return points


class TestConstants:

    def test_grid_length(self):
        assert stable_meb.grid_length(0.5) == 7

    def test_radius_interval(self):
        interval = stable_meb.radius_interval_from_distance(2.0, 0.5)
        assert interval.a == pytest.approx(1.0)
        assert interval.b == pytest.approx(2.0 / 0.75)

    def test_zero_distance_is_degenerate(self):
        assert stable_meb.radius_interval_from_distance(0.0, 0.5).degenerate

    def test_expansion_factor(self):
        expected = (1.0 + (2.0 * math.sqrt(2.0) + math.sqrt(3.0)) * 0.1) / 0.99
        assert stable_meb.alg1_expansion_factor(0.1) == pytest.approx(expected)
        assert stable_meb.alg1_lambda(0.1) == pytest.approx(expected * 1.01)

    def test_sample_sizes(self):
        assert stable_meb.alg1_sample_size(3, 0.1, 0.1) == math.ceil(10 * 3 * math.log(30))
        assert stable_meb.oracle_sample_size(10, 0.5, 0.1) == math.ceil(2 * math.log(100))

    def test_alg2_factors_exceed_one(self):
        assert stable_meb.alg2_lambda(0.2) > stable_meb.alg2_radius_factor(0.2) > 1.0


class TestRadiusRange:

    def test_interval_brackets_radius(self, ball_instance):
        radius = exact_meb(ball_instance).optimum_size
        interval = radius_range(ball_instance, 0.1, 0.1, RngStream(0), 0.5)
        assert interval.a <= radius <= interval.b

    def test_single_point_is_degenerate(self):
        trace = RunTrace()
        interval = radius_range(PointSet(np.zeros((1, 2))), 0.1, 0.1, RngStream(0), 0.5, trace=trace)
        assert interval.degenerate
        assert 'degenerate-interval' in trace.flags

    def test_sample_is_sublinear(self, ball_instance):
        trace = RunTrace()
        radius_range(ball_instance, 0.1, 0.1, RngStream(0), 0.5, trace=trace)
        assert trace.full_passes == 0
        assert trace.samples['radius_range'] == math.ceil(10 * math.log(10))


class TestAlg1:

    def test_covers_within_lambda(self, ball_instance):
        epsilon = 0.3
        ball = meb_alg1(ball_instance, epsilon, 0.1, 0.1, RngStream(1))
        radius = exact_meb(ball_instance).optimum_size
        assert np.max(center_distances(ball_instance, ball.center)) <= ball.radius
        assert ball.radius <= stable_meb.alg1_lambda(epsilon) * radius * (1.0 + 1e-9)

    def test_never_scans_everything(self, ball_instance):
        trace = RunTrace()
        meb_alg1(ball_instance, 0.3, 0.1, 0.1, RngStream(1), trace=trace)
        assert trace.full_passes == 0

    def test_rejects_bad_parameters(self, ball_instance):
        with pytest.raises(ValueError):
            meb_alg1(ball_instance, 0.3, 1.5, 0.1, RngStream(1))


class TestOracleAndAlg2:

    def test_huge_guess_is_accepted(self, ball_instance):
        verdict, _ = stable_meb.test_h(ball_instance, 1e6, 3, 0.1, 0.1, RngStream(0), 0.3)
        assert verdict

    def test_zero_guess_is_rejected(self, ball_instance):
        verdict, _ = stable_meb.test_h(ball_instance, 0.0, 3, 0.1, 0.1, RngStream(0), 0.3)
        assert not verdict

    def test_invalid_rounds(self, ball_instance):
        with pytest.raises(ValueError):
            stable_meb.test_h(ball_instance, 1.0, 0, 0.1, 0.1, RngStream(0), 0.3)

    def test_alg2_is_reproducible(self, ball_instance):
        a = meb_alg2(ball_instance, 0.3, 0.1, 0.1, RngStream(4))
        b = meb_alg2(ball_instance, 0.3, 0.1, 0.1, RngStream(4))
        assert a.radius == b.radius
        assert a.center.digest() == b.center.digest()

    def test_alg2_records_grid(self, ball_instance):
        trace = RunTrace()
        meb_alg2(ball_instance, 0.5, 0.1, 0.1, RngStream(4), trace=trace)
        assert trace.notes['grid_length'] == 7
        assert 'i0' in trace.notes

    def test_alg2_degenerate_input(self):
        trace = RunTrace()
        ball = meb_alg2(PointSet(np.ones((5, 2))), 0.3, 0.1, 0.1, RngStream(0), trace=trace)
        assert ball.radius <= 1e-12
        assert 'alg1-fallback' in trace.flags

    def test_alg2_single_point(self):
        ball = meb_alg2(PointSet(np.ones((1, 2))), 0.3, 0.1, 0.1, RngStream(0))
        assert ball.radius == 0.0

    @pytest.mark.parametrize("answer, i0, flag", [(False, 'top', 'all-no'), (True, -1, 'all-yes')])
    def test_alg2_search_stays_on_the_grid(self, monkeypatch, gaussian_cloud, answer, i0, flag):
        guesses = []

        def fixed_answer(points, h, *args, **kwargs):
            guesses.append(h)
            return answer, Center.point(0)

        monkeypatch.setattr(stable_meb, 'radius_range', lambda *args, **kwargs: RadiusInterval(1.0, 2.0))
        monkeypatch.setattr(stable_meb, 'test_h', fixed_answer)
        trace = RunTrace()
        meb_alg2(gaussian_cloud, 0.3, 0.1, 0.1, RngStream(0), trace=trace)

        w = stable_meb.grid_length(0.3)
        top = (1.0 + 0.09) ** (w - 1) * (1.0 - 0.09)
        bottom = 1.0 - 0.09
        assert all(bottom * (1.0 - 1e-12) <= h <= top * (1.0 + 1e-12) for h in guesses[:-1])
        assert trace.notes['i0'] == (w - 1 if i0 == 'top' else i0)
        assert flag in trace.flags

    def test_alg2_degenerate_interval_still_covers(self, monkeypatch, gaussian_cloud):
        monkeypatch.setattr(
            stable_meb, 'radius_range', lambda *args, **kwargs: RadiusInterval(0.0, 0.0, degenerate=True)
        )
        trace = RunTrace()
        ball = meb_alg2(gaussian_cloud, 0.3, 0.1, 0.1, RngStream(3), trace=trace)
        assert 'alg1-fallback' in trace.flags
        assert ball.radius > 0.0
        assert np.max(center_distances(gaussian_cloud, ball.center)) <= ball.radius

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(5))
    def test_alg2_covers_uniform_ball(self, ball_instance, seed):
        epsilon = 0.3
        ball = meb_alg2(ball_instance, epsilon, 0.1, 0.1, RngStream(seed))
        assert np.max(center_distances(ball_instance, ball.center)) <= ball.radius
