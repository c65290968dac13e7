"""Tests for point sets, dataset files, configuration and reports."""

import json
from pathlib import Path

import numpy as np
import pytest
from scipy import sparse

from src.models import (
    PointSet,
    PlantedTruth,
    OutlierInstance,
    DatasetLoader,
    Center,
    Ball,
    RadiusInterval,
    BiCriteriaParams,
    StabilityParams,
    SolverConfig,
    SolveReport,
    RunTrace,
    load_dense,
    load_sparse,
    save_dense,
    save_sparse,
    save_truth,
    load_truth,
    stack_point_sets,
    uniform_sample,
    DENSE_DIMENSION_THRESHOLD,
)
from src.utils import DatasetParseError, RngStream


class TestPointSet:

    def test_shape_and_norms(self, square):
        assert (square.n, square.d) == (4, 2)
        np.testing.assert_allclose(square.sq_norms, [0.0, 4.0, 4.0, 8.0])

    def test_rows_are_read_only(self, square):
        with pytest.raises(ValueError):
            square.dense[0, 0] = 1.0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PointSet(np.array([[0.0, np.nan]]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            PointSet(np.empty((0, 3)))

    def test_wide_sparse_input_stays_csr(self):
        matrix = sparse.random(20, DENSE_DIMENSION_THRESHOLD + 10, density=0.05, random_state=1, format='csr')
        points = PointSet(matrix)
        assert points.is_sparse
        dense = PointSet(matrix.toarray())
        v = np.linspace(0.0, 1.0, points.d)
        np.testing.assert_allclose(points.sq_distances(v), dense.sq_distances(v), atol=1e-12)
        np.testing.assert_allclose(points.gram([0, 1, 2]), dense.gram([0, 1, 2]), atol=1e-12)

    def test_narrow_sparse_input_is_densified(self):
        points = PointSet(sparse.csr_matrix(np.eye(3)))
        assert not points.is_sparse

    def test_digest_depends_on_values(self, square):
        moved = PointSet(square.dense + 1e-9)
        assert square.digest() == PointSet(square.dense).digest()
        assert square.digest() != moved.digest()

    def test_stack_and_subset(self, square):
        stacked = stack_point_sets(square, square.subset([3]))
        assert stacked.n == 5
        np.testing.assert_array_equal(stacked.rows_dense([4]), [[2.0, 2.0]])

    def test_stack_rejects_dimension_mismatch(self, square):
        with pytest.raises(ValueError):
            stack_point_sets(square, PointSet(np.zeros((1, 3))))

    def test_uniform_sample(self, square):
        sample = uniform_sample(square, 50, RngStream(0))
        assert sample.shape == (50,)
        assert sample.min() >= 0 and sample.max() < 4
        with pytest.raises(ValueError):
            uniform_sample(square, 0, RngStream(0))


class TestOutlierInstance:

    def test_inlier_count_rounds_up(self, square):
        inst = OutlierInstance(square, 0.3)
        assert inst.inlier_count == 3
        assert inst.outlier_count == 1

    @pytest.mark.parametrize("gamma", [-0.1, 1.0])
    def test_gamma_range(self, square, gamma):
        with pytest.raises(ValueError):
            OutlierInstance(square, gamma)


class TestDenseFiles:

    def test_round_trip_keeps_full_precision(self, tmp_path, gaussian_cloud):
        path = tmp_path / 'points.csv'
        save_dense(gaussian_cloud, path)
        assert load_dense(path).digest() == gaussian_cloud.digest()

    def test_header_is_skipped(self, tmp_path):
        path = tmp_path / 'h.csv'
        path.write_text("x,y\n1,2\n3,4\n")
        points = load_dense(path, has_header=True)
        np.testing.assert_array_equal(points.dense, [[1.0, 2.0], [3.0, 4.0]])

    def test_non_numeric_cell_reports_line(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text("1,2\n3,abc\n")
        with pytest.raises(DatasetParseError) as info:
            load_dense(path)
        assert info.value.line == 2

    def test_long_row_reports_line(self, tmp_path):
        path = tmp_path / 'ragged.csv'
        path.write_text("1,2\n3,4\n5,6,7\n")
        with pytest.raises(DatasetParseError) as info:
            load_dense(path)
        assert info.value.line == 3

    def test_short_row_reports_column_count(self, tmp_path):
        path = tmp_path / 'short.csv'
        path.write_text("1,2,3\n4,5\n")
        with pytest.raises(DatasetParseError) as info:
            load_dense(path)
        assert info.value.line == 2
        assert 'expected 3 columns' in str(info.value)
        assert 'non-numeric' not in str(info.value)

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'empty.csv'
        path.write_text("")
        with pytest.raises(DatasetParseError):
            load_dense(path)


class TestSparseFiles:

    def test_parse_labels_and_dimension(self, tmp_path):
        path = tmp_path / 'a.svm'
        path.write_text("+1 1:0.5 3:2\n-1 2:1 # comment\n\n")
        points, labels = load_sparse(path)
        assert labels == [1, -1]
        assert points.d == 3
        np.testing.assert_array_equal(points.dense, [[0.5, 0.0, 2.0], [0.0, 1.0, 0.0]])

    @pytest.mark.parametrize("line", ["+1 2:1 1:3", "+1 0:1", "+1 1-3", "x 1:1"])
    def test_malformed_lines(self, tmp_path, line):
        path = tmp_path / 'bad.svm'
        path.write_text(f"+1 1:1\n{line}\n")
        with pytest.raises(DatasetParseError) as info:
            load_sparse(path)
        assert info.value.line == 2

    def test_round_trip(self, tmp_path, square):
        path = tmp_path / 'square.svm'
        save_sparse(square, [1, -1, 1, -1], path)
        points, labels = load_sparse(path)
        assert labels == [1, -1, 1, -1]
        np.testing.assert_array_equal(points.dense, square.dense)


class TestDatasetLoader:

    def test_missing_file(self, tmp_path):
        ok, message = DatasetLoader().load(str(tmp_path / 'none.csv'))
        assert not ok
        assert 'not found' in message

    def test_parse_failure_is_reported(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text("1,a\n")
        ok, message = DatasetLoader().load(str(path))
        assert not ok
        assert 'line 1' in message

    def test_split_by_label(self, tmp_path):
        path = tmp_path / 'two.svm'
        path.write_text("+1 1:1\n-1 1:2\n+1 1:3\n")
        loader = DatasetLoader()
        ok, _ = loader.load(str(path))
        assert ok and loader.format == 'sparse'
        first, second = loader.split_by_label()
        np.testing.assert_array_equal(first, [0, 2])
        np.testing.assert_array_equal(second, [1])

    def test_split_without_labels(self, tmp_path):
        path = tmp_path / 'p.csv'
        path.write_text("1,2\n")
        loader = DatasetLoader()
        loader.load(str(path))
        with pytest.raises(ValueError):
            loader.split_by_label()


class TestTruthSidecar:

    def test_round_trip(self, tmp_path):
        truth = PlantedTruth([3, 1], 2.5, np.array([0.0, 1.0]), 'planted-outliers', {'gamma': 0.5})
        save_truth(truth, 0.5, tmp_path / 't.json', {'n': 4})
        loaded, gamma = load_truth(tmp_path / 't.json')
        assert gamma == 0.5
        np.testing.assert_array_equal(loaded.inlier_indices, [1, 3])
        assert loaded.optimum_size == 2.5
        assert loaded.family == 'planted-outliers'


class TestCenter:

    def test_combination_merges_and_normalizes(self):
        center = Center.combination([2, 0, 2], [1.0, 1.0, 2.0])
        np.testing.assert_array_equal(center.support, [0, 2])
        np.testing.assert_allclose(center.weights, [0.25, 0.75])

    def test_to_vector(self, square):
        center = Center.combination([0, 3], [0.5, 0.5])
        np.testing.assert_allclose(center.to_vector(square), [1.0, 1.0])

    def test_rejects_mixed_forms(self):
        with pytest.raises(ValueError):
            Center(vector=np.zeros(2), support=np.array([0]), weights=np.array([1.0]))

    def test_dict_round_trip(self):
        center = Center.combination([1, 4], [0.2, 0.8])
        assert Center.from_dict(center.to_dict()).digest() == center.digest()

    def test_validate_for(self, square):
        with pytest.raises(ValueError):
            Center.point(9).validate_for(square)
        with pytest.raises(ValueError):
            Center.explicit([0.0, 0.0, 0.0]).validate_for(square)

    def test_ball_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            Ball(Center.point(0), -1.0)

    def test_radius_interval(self):
        interval = RadiusInterval(1.0, 2.0)
        assert interval.contains(1.5)
        assert not interval.contains(2.5)
        with pytest.raises(ValueError):
            RadiusInterval(0.0, 1.0)


class TestParams:

    def test_default_round_cap(self):
        assert BiCriteriaParams(0.5, 0.1).rounds == 5

    @pytest.mark.parametrize("kwargs", [
        {'epsilon': 0.0, 'delta': 0.1},
        {'epsilon': 0.2, 'delta': 1.0},
        {'epsilon': 0.2, 'delta': 0.1, 'z': 0},
        {'epsilon': 0.2, 'delta': 0.1, 'repetitions': 0},
    ])
    def test_invalid_bicriteria(self, kwargs):
        with pytest.raises(ValueError):
            BiCriteriaParams(**kwargs)

    def test_invalid_stability(self):
        with pytest.raises(ValueError):
            StabilityParams(0.1, 1.5, 0.1)


class TestSolverConfig:

    def test_file_round_trip(self, tmp_path):
        config = SolverConfig()
        config.mex.candidate_budget = 9
        assert config.save_to_file(tmp_path / 'c.json')
        loaded = SolverConfig.load_from_file(tmp_path / 'c.json')
        assert loaded.mex.candidate_budget == 9
        assert loaded.to_dict() == config.to_dict()

    def test_unknown_key_is_rejected(self):
        with pytest.raises(ValueError):
            SolverConfig.from_dict({'mex': {'budget': 3}})
        with pytest.raises(ValueError):
            SolverConfig.from_dict({'plotting': {}})

    def test_load_failure_returns_none(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"sampling": {"c9": 1}}')
        assert SolverConfig.load_from_file(path) is None
        assert SolverConfig.load_from_file(tmp_path / 'missing.json') is None

    def test_shipped_default_config_loads(self):
        assert SolverConfig.load_from_file(Path(__file__).resolve().parent.parent / 'config' / 'default_config.json') is not None


class TestSolveReport:

    def _report(self) -> SolveReport:
        trace = RunTrace()
        trace.touch(10, full=True)
        trace.flag('t-clamped')
        trace.notes['t'] = 3
        return SolveReport.for_run('bc-meb', 'abc', 4, {'epsilon': 0.1}, {'radius': 1.0}, trace, 0.0, coverage=10)

    def test_trace_is_absorbed(self):
        report = self._report()
        assert report.points_touched == 10
        assert report.passes == 1
        assert report.flags == ['t-clamped']
        assert report.parameters['recorded'] == {'t': 3}

    def test_digest_ignores_wall_time(self):
        a, b = self._report(), self._report()
        b.wall_ms = a.wall_ms + 100.0
        assert a.digest() == b.digest()

    def test_file_round_trip(self, tmp_path):
        report = self._report()
        assert report.save_to_file(tmp_path / 'r.json')
        loaded = SolveReport.load_from_file(tmp_path / 'r.json')
        assert loaded.digest() == report.digest()

    def test_unsupported_schema(self, tmp_path):
        path = tmp_path / 'r.json'
        path.write_text(json.dumps({'schema': 99, 'algorithm': 'x'}))
        assert SolveReport.load_from_file(path) is None
