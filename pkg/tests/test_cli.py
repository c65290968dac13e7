"""End-to-end tests of the command-line controller."""

import io
import json
import math

import pandas as pd
import pytest

from src.controllers import CliController
from src.controllers.bench_controller import BENCH_COLUMNS


def run_cli(*argv: str) -> tuple[int, str]:
    """Run one command with file logging off; returns (exit code, stdout)."""
    stdout = io.StringIO()
    code = CliController(stdout=stdout).run(['--log-dir', '', *argv])
    return code, stdout.getvalue()


@pytest.fixture
def ball_csv(tmp_path) -> str:
    path = str(tmp_path / 'ball.csv')
    code, _ = run_cli('generate', '--family', 'uniform-ball', '--n', '120', '--d', '3', '--seed', '2', '--out', path)
    assert code == 0
    return path


@pytest.fixture
def bc_report(tmp_path, ball_csv) -> str:
    path = str(tmp_path / 'report.json')
    code, _ = run_cli('solve', ball_csv, '--algo', 'bc-meb', '--epsilon', '0.1', '--out', path)
    assert code == 0
    return path


class TestGenerate:

    def test_simplex_summary(self, tmp_path):
        out = tmp_path / 'simplex.csv'
        code, stdout = run_cli('generate', '--family', 'simplex', '--d', '3', '--out', str(out))
        summary = json.loads(stdout)
        assert code == 0
        assert summary['n'] == 4
        assert summary['optimum_size'] == pytest.approx(math.sqrt(3.0 / 8.0))
        assert out.is_file()
        assert (tmp_path / 'simplex.truth.json').is_file()

    def test_planted_inlier_count(self, tmp_path):
        code, stdout = run_cli(
            'generate', '--family', 'planted-outliers', '--n', '100', '--d', '3', '--gamma', '0.05',
            '--out', str(tmp_path / 'p.csv'),
        )
        assert code == 0
        assert json.loads(stdout)['inliers'] == 95

    def test_sparse_output_keeps_labels(self, tmp_path):
        out = tmp_path / 'two.svm'
        code, _ = run_cli('generate', '--family', 'two-class-margin', '--n', '40', '--d', '2', '--out', str(out))
        assert code == 0
        first_tokens = [line.split()[0] for line in out.read_text().splitlines() if line.strip()]
        assert set(first_tokens) == {'+1', '-1'}

    def test_missing_out_is_an_error(self):
        code, _ = run_cli('generate', '--family', 'simplex')
        assert code == 1

    def test_parameter_not_taken_by_family(self, tmp_path):
        code, _ = run_cli('generate', '--family', 'simplex', '--n', '5', '--out', str(tmp_path / 's.csv'))
        assert code == 1


class TestSolveAndVerify:

    def test_report_verifies(self, bc_report, ball_csv):
        code, stdout = run_cli('verify', bc_report, ball_csv)
        verdict = json.loads(stdout)
        assert code == 0
        assert verdict['passed'] is True
        assert verdict['algorithm'] == 'bc-meb'

    def test_solve_prints_the_report(self, ball_csv):
        code, stdout = run_cli('solve', ball_csv, '--algo', 'bc-meb', '--epsilon', '0.2', '--verify-coverage')
        report = json.loads(stdout)
        assert code == 0
        assert report['status'] == 'ok'
        assert report['verification']['passed'] is True

    def test_tampered_report_fails(self, tmp_path, bc_report, ball_csv):
        data = json.loads(open(bc_report, encoding='utf-8').read())
        data['result']['radius'] *= 0.5
        tampered = tmp_path / 'tampered.json'
        tampered.write_text(json.dumps(data), encoding='utf-8')
        code, stdout = run_cli('verify', str(tampered), ball_csv)
        assert code == 1
        assert json.loads(stdout)['passed'] is False

    def test_report_for_other_data(self, tmp_path, bc_report):
        other = str(tmp_path / 'other.csv')
        run_cli('generate', '--family', 'uniform-ball', '--n', '120', '--d', '3', '--seed', '3', '--out', other)
        code, _ = run_cli('verify', bc_report, other)
        assert code == 1

    def test_budget_refusal_exit_code(self, tmp_path):
        path = str(tmp_path / 'k.csv')
        run_cli('generate', '--family', 'k-clusters', '--n', '60', '--d', '2', '--k', '3', '--out', path)
        code, stdout = run_cli('solve', path, '--algo', 'kcenter', '--k', '3', '--epsilon', '0.1', '--delta', '0.1')
        assert code == 2
        assert json.loads(stdout)['status'] == 'refused'

    def test_missing_dataset(self, tmp_path):
        code, _ = run_cli('solve', str(tmp_path / 'none.csv'), '--algo', 'bc-meb', '--epsilon', '0.1')
        assert code == 1

    def test_missing_algorithm_parameter(self, ball_csv):
        code, _ = run_cli('solve', ball_csv, '--algo', 'outliers-linear', '--epsilon', '0.1')
        assert code == 1


class TestBench:

    def test_csv_file(self, tmp_path):
        out = tmp_path / 'bench' / 'results.csv'
        code, _ = run_cli(
            'bench', '--family', 'planted-outliers', '--algos', 'baseline,outliers-linear',
            '--ns', '60,80', '--seeds', '2', '--d', '2', '--out', str(out),
        )
        assert code == 0
        frame = pd.read_csv(out)
        assert list(frame.columns) == BENCH_COLUMNS
        assert len(frame) == 8
        baseline = frame[frame['algorithm'] == 'baseline']
        assert (baseline['points_touched'] == baseline['n']).all()

    def test_csv_to_stdout(self):
        code, stdout = run_cli('bench', '--family', 'uniform-ball', '--algos', 'bc-meb', '--ns', '50', '--seeds', '1',
                               '--d', '2')
        frame = pd.read_csv(io.StringIO(stdout))
        assert code == 0
        assert len(frame) == 1
        assert bool(frame.loc[0, 'success'])

    def test_unknown_algorithm(self):
        code, _ = run_cli('bench', '--family', 'uniform-ball', '--algos', 'nope', '--ns', '50')
        assert code == 1


class TestGlobalOptions:

    def test_no_command(self):
        code, _ = run_cli()
        assert code == 1

    def test_missing_config_file(self, tmp_path):
        code, _ = run_cli('--config', str(tmp_path / 'missing.json'), 'generate', '--family', 'simplex',
                          '--out', str(tmp_path / 's.csv'))
        assert code == 1
