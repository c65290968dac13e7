"""Tests for selection helpers, seeded streams and the worker pool."""

import logging

import numpy as np
import pytest
from scipy import stats
from hypothesis import given, settings, strategies as st

from src.utils import logger as logger_module
from src.utils import (
    RngStream,
    safe_ceil,
    safe_floor,
    exclusion_count,
    top_t,
    kth_largest,
    kth_smallest,
    argmax_lowest,
    ordered_map,
    resolve_workers,
    detect_format,
    truth_sidecar_path,
    THREADS_ENV_VAR,
    setup_root_logger,
    parse_level,
)


class TestSafeCeil:

    def test_noise_above_integer_is_ignored(self):
        assert safe_ceil(1.5 * 0.30000000000000004 * 100) == 45

    def test_regular_ceiling(self):
        assert safe_ceil(2.1) == 3
        assert safe_ceil(3.0) == 3


class TestExclusionCount:

    def test_outliers_plus_floor_of_delta(self):
        assert exclusion_count(200, 0.05, 0.1) == 30
        assert exclusion_count(10, 0.2, 0.05) == 2

    def test_small_delta_excludes_nothing_without_outliers(self):
        assert exclusion_count(3, 0.0, 0.05) == 0
        assert exclusion_count(6, 0.0, 0.05) == 0

    def test_noise_below_integer_is_ignored(self):
        assert safe_floor(0.29 * 100) == 29
        assert exclusion_count(100, 0.0, 0.29) == 29

    def test_clamped_below_n(self):
        assert exclusion_count(20, 0.5, 0.6) == 19


class TestTopT:

    def test_selects_largest_with_next_value(self):
        Q, l = top_t(np.array([1.0, 5.0, 3.0, 4.0, 2.0]), 2)
        np.testing.assert_array_equal(Q, [1, 3])
        assert l == 3.0

    def test_ties_go_to_lowest_index(self):
        Q, l = top_t(np.array([2.0, 7.0, 7.0, 7.0, 1.0]), 2)
        np.testing.assert_array_equal(Q, [1, 2])
        assert l == 7.0

    def test_zero_returns_maximum(self):
        Q, l = top_t(np.array([1.0, 9.0, 4.0]), 0)
        assert Q.size == 0
        assert l == 9.0

    @pytest.mark.parametrize("t", [-1, 3])
    def test_out_of_range(self, t):
        with pytest.raises(ValueError):
            top_t(np.array([1.0, 2.0, 3.0]), t)

    @given(
        values=st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=60),
        data=st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_matches_sorting(self, values, data):
        values = np.array(values)
        t = data.draw(st.integers(0, values.size - 1))
        Q, l = top_t(values, t)
        assert Q.size == t
        assert l == pytest.approx(np.sort(values)[::-1][t])
        if t:
            assert np.min(values[Q]) >= l


class TestOrderStatistics:

    def test_kth_largest_and_smallest(self):
        values = np.array([4.0, 1.0, 3.0, 2.0])
        assert kth_largest(values, 1) == 4.0
        assert kth_largest(values, 4) == 1.0
        assert kth_smallest(values, 2) == 2.0

    def test_rank_out_of_range(self):
        with pytest.raises(ValueError):
            kth_largest(np.array([1.0]), 2)
        with pytest.raises(ValueError):
            kth_smallest(np.array([1.0]), 0)

    def test_argmax_lowest(self):
        assert argmax_lowest(np.array([1.0, 3.0, 3.0])) == 1


class TestRngStream:

    def test_same_identity_same_draws(self):
        a = RngStream(5, 2).integers(1000, 20)
        b = RngStream(5, 2).integers(1000, 20)
        np.testing.assert_array_equal(a, b)

    def test_children_are_independent_of_use_order(self):
        parent = RngStream(3)
        first = parent.child(1).integers(10 ** 9, 5)
        parent.child(0).integers(10 ** 9, 100)
        again = RngStream(3).child(1).integers(10 ** 9, 5)
        np.testing.assert_array_equal(first, again)

    def test_streams_differ(self):
        assert not np.array_equal(RngStream(1, 0).integers(10 ** 9, 8), RngStream(1, 1).integers(10 ** 9, 8))

    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            RngStream(-1)

    def test_child_path(self):
        assert RngStream(4).child(2).child(9).path == (2, 9)

    @pytest.mark.parametrize("seed", [0, 11, 12345])
    def test_indices_are_uniform(self, seed):
        counts = np.bincount(RngStream(seed).integers(10, 20000), minlength=10)
        assert stats.chisquare(counts).pvalue > 1e-4


class TestParallel:

    def test_results_keep_submission_order(self):
        assert ordered_map(lambda x: x * x, range(10), workers=4) == [x * x for x in range(10)]

    def test_environment_overrides_config(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, '3')
        assert resolve_workers(8) == 3

    def test_invalid_environment_falls_back(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, 'many')
        assert resolve_workers(2) == 2


class TestFileHelpers:

    @pytest.mark.parametrize("path,expected", [
        ('data/a.csv', 'dense'),
        ('data/a.svm', 'sparse'),
        ('data/a.LIBSVM', 'sparse'),
        ('data/a.txt', 'dense'),
    ])
    def test_detect_format(self, path, expected):
        assert detect_format(path) == expected

    def test_truth_sidecar_path(self):
        assert truth_sidecar_path('data/p.csv').as_posix() == 'data/p.truth.json'


class TestLogger:

    def test_log_dir_adds_dated_file(self, tmp_path):
        target = logging.getLogger('geo_sublinear.tests.file')
        target.propagate = False
        target.setLevel(logging.DEBUG)
        log_dir = tmp_path / 'logs'
        logger_module._attach_handlers(target, str(log_dir), logging.DEBUG)
        try:
            target.debug("hello")
            for handler in target.handlers:
                handler.flush()
            files = list(log_dir.glob('geo_sublinear_*.log'))
            assert len(target.handlers) == 2
            assert len(files) == 1
            assert 'hello' in files[0].read_text(encoding='utf-8')
        finally:
            for handler in list(target.handlers):
                handler.close()
                target.removeHandler(handler)

    def test_root_setup_keeps_existing_handlers(self, monkeypatch):
        root = logging.getLogger()
        existing = logging.NullHandler()
        root.addHandler(existing)
        monkeypatch.setattr(root, 'level', root.level)
        try:
            before = list(root.handlers)
            setup_root_logger(None, logging.WARNING)
            assert root.handlers == before
            assert root.level == logging.WARNING
        finally:
            root.removeHandler(existing)

    def test_parse_level(self):
        assert parse_level('debug') == logging.DEBUG
        with pytest.raises(ValueError):
            parse_level('chatty')
