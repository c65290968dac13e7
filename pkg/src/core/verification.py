"""
Full-scan contract checks for solver reports.

ContractVerifier re-derives every guarantee a report claims from the data
alone: coverage is recounted against the reported shape, sizes are compared
with the exact oracle (or the planted optimum when the dataset came from
the instance generator) and hybrid labels are recomputed from their ratio.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..models import PointSet, Center, PlantedTruth, OutlierInstance, SolveReport, SolverConfig, stack_point_sets
from ..utils import get_logger, safe_ceil, RefusalError, DigestMismatchError
from .hybrid import meb_threshold, outliers_threshold, label_for
from .kernels import Kernel, center_distances
from .oracle import exact_meb, exact_meb_outliers_tiny
from .shapes import KBallFamily, SlabFamily, LineCenter, BOUNDARY_SLACK
from .stable_meb import alg1_lambda, alg2_lambda

logger = get_logger(__name__)

SIZE_TOLERANCE = 1e-9
BALL_FAMILIES = {'uniform-ball', 'simplex', 'planted-outliers', 'satellite'}


@dataclass
class CheckResult:
    """Outcome of one contract check; passed is None when the check was skipped."""
    name: str
    passed: bool | None
    detail: str = ''

    def to_dict(self) -> dict:
        status = 'skipped' if self.passed is None else ('pass' if self.passed else 'fail')
        return {'check': self.name, 'status': status, 'detail': self.detail}


def _at_least(name: str, count: int, required: int) -> CheckResult:
    return CheckResult(name, count >= required, f"{count} points covered, {required} required")


def _at_most(name: str, size: float, bound: float | None, what: str) -> CheckResult:
    if bound is None:
        return CheckResult(name, None, f"no reference {what} available")
    return CheckResult(
        name,
        size <= bound * (1.0 + SIZE_TOLERANCE) + SIZE_TOLERANCE,
        f"size {size:.9g}, bound {bound:.9g} from {what}",
    )


def kernel_from_report(report: SolveReport) -> Kernel:
    data = report.parameters.get('kernel') or {}
    return Kernel(data.get('kind', 'linear'), data.get('bandwidth') or 1.0)


class ContractVerifier:
    """
    Checks SolveReports against the dataset they were computed on.

    Args:
        points: The dataset.
        labels: Class labels (two-class reports only).
        truth: Planted truth of a generated dataset, if known.
        gamma: Outlier fraction to assume when the report does not record one.
        config: Solver configuration (oracle caps and tolerances).
    """

    def __init__(
        self,
        points: PointSet,
        labels: list[int] | None = None,
        truth: PlantedTruth | None = None,
        gamma: float = 0.0,
        config: SolverConfig | None = None
    ):
        self._points = points
        self._labels = labels
        self._truth = truth
        self._gamma = gamma
        self._config = config or SolverConfig()
        self._digest = points.digest()
        self._meb_optimum: float | None = None

        self._checks = {
            'bc-meb': self._check_meb,
            'meb-alg1': self._check_meb,
            'meb-alg2': self._check_meb,
            'outliers-linear': self._check_outliers,
            'outliers-sublinear': self._check_outliers,
            'hybrid-meb': self._check_hybrid_meb,
            'hybrid-outliers': self._check_hybrid_outliers,
            'kcenter': self._check_kcenter,
            'linefit': self._check_linefit,
            'svm1': self._check_svm1,
            'svm2': self._check_svm2,
        }

    @property
    def digest(self) -> str:
        return self._digest

    def verify(self, report: SolveReport) -> list[CheckResult]:
        """
        Run every check that applies to the report.

        Raises:
            DigestMismatchError: If the report was computed on other data.
            ValueError: For an algorithm without a contract.
        """
        if report.dataset_digest != self._digest:
            raise DigestMismatchError(
                f"report digest {report.dataset_digest[:16]} does not match dataset {self._digest[:16]}"
            )
        if report.algorithm not in self._checks:
            raise ValueError(f"no contract known for algorithm '{report.algorithm}'")

        checks = [CheckResult('dataset-digest', True, self._digest[:16])]
        if report.status != 'ok':
            checks.append(CheckResult('result', None, f"run ended with status '{report.status}'"))
            return checks
        checks.extend(self._checks[report.algorithm](report))
        for check in checks:
            if check.passed is False:
                logger.warning(f"{report.algorithm}: check {check.name} failed ({check.detail})")
        return checks

    # ----- references -----

    def _gamma_of(self, report: SolveReport) -> float:
        return float(report.parameters.get('gamma', self._gamma) or 0.0)

    def _truth_size(self, families: set[str], gamma: float | None = None) -> float | None:
        truth = self._truth
        if truth is None or truth.family not in families:
            return None
        planted_gamma = truth.extra.get('gamma', truth.extra.get('params', {}).get('gamma', 0.0))
        if gamma is not None and not math.isclose(planted_gamma, gamma, abs_tol=1e-12):
            return None
        return truth.optimum_size

    def _exact_meb_size(self, kernel: Kernel) -> float | None:
        if not kernel.is_linear:
            return None
        if self._meb_optimum is None:
            self._meb_optimum = exact_meb(self._points, self._config).optimum_size
        return self._meb_optimum

    def _outlier_optimum(self, gamma: float, kernel: Kernel) -> tuple[float | None, str]:
        if gamma == 0.0:
            return self._exact_meb_size(kernel), 'exact MEB'
        planted = self._truth_size(BALL_FAMILIES, gamma)
        if planted is not None:
            return planted, 'planted optimum'
        if not kernel.is_linear:
            return None, 'oracle'
        try:
            oracle = exact_meb_outliers_tiny(OutlierInstance(self._points, gamma), self._config)
        except RefusalError as e:
            logger.info(f"outlier oracle skipped: {e}")
            return None, 'oracle'
        return oracle.optimum_size, 'outlier oracle'

    def _ball_coverage(self, ball: dict, kernel: Kernel) -> int:
        dist = center_distances(self._points, Center.from_dict(ball['center']), kernel)
        return int(np.count_nonzero(dist <= ball['radius'] + BOUNDARY_SLACK * max(1.0, ball['radius'])))

    # ----- contracts -----

    def _check_meb(self, report: SolveReport) -> list[CheckResult]:
        kernel = kernel_from_report(report)
        epsilon = report.parameters['epsilon']
        factor = {
            'bc-meb': 1.0 + epsilon,
            'meb-alg1': alg1_lambda(epsilon),
            'meb-alg2': alg2_lambda(epsilon),
        }[report.algorithm]
        ball = report.result
        optimum = self._exact_meb_size(kernel)
        return [
            _at_least('coverage', self._ball_coverage(ball, kernel), self._points.n),
            _at_most('size', ball['radius'], None if optimum is None else factor * optimum, 'exact MEB'),
        ]

    def _check_outliers(self, report: SolveReport) -> list[CheckResult]:
        kernel = kernel_from_report(report)
        gamma = self._gamma_of(report)
        epsilon, delta = report.parameters['epsilon'], report.parameters['delta']
        n = self._points.n
        ball = report.result
        optimum, source = self._outlier_optimum(gamma, kernel)
        return [
            _at_least('coverage', self._ball_coverage(ball, kernel), n - min(safe_ceil((delta + gamma) * n), n - 1)),
            _at_most('size', ball['radius'], None if optimum is None else (1.0 + epsilon) * optimum, source),
        ]

    def _label_check(self, result: dict, threshold: float) -> CheckResult:
        expected = label_for(result['ratio'], threshold)
        return CheckResult(
            'label',
            expected == result['label'] and math.isclose(result['threshold'], threshold, rel_tol=1e-12),
            f"ratio {result['ratio']:.9g} against threshold {threshold:.9g}",
        )

    def _check_hybrid_meb(self, report: SolveReport) -> list[CheckResult]:
        kernel = kernel_from_report(report)
        epsilon, delta = report.parameters['epsilon'], report.parameters['delta']
        result, n = report.result, self._points.n
        ball = result['ball']
        optimum = self._exact_meb_size(kernel)
        checks = [self._label_check(result, meb_threshold(epsilon))]
        r_c, r_o = result.get('r_c'), result.get('r_o')
        if r_c is not None and r_o is not None and r_c > 0:
            checks.append(CheckResult(
                'ratio', math.isclose(result['ratio'], r_o / r_c, rel_tol=1e-9), f"r_o={r_o:.9g}, r_c={r_c:.9g}"
            ))
        if result['label'] == 'radius-approx':
            required, bound = n, None if optimum is None else (1.0 + epsilon) * optimum
        else:
            required, bound = n - safe_ceil(delta * n), optimum
        checks.append(_at_least('coverage', self._ball_coverage(ball, kernel), required))
        checks.append(_at_most('size', ball['radius'], bound, 'exact MEB'))
        return checks

    def _check_hybrid_outliers(self, report: SolveReport) -> list[CheckResult]:
        kernel = kernel_from_report(report)
        gamma = self._gamma_of(report)
        epsilon, delta = report.parameters['epsilon'], report.parameters['delta']
        result, n = report.result, self._points.n
        ball = result['ball']
        optimum, source = self._outlier_optimum(gamma, kernel)
        checks = [self._label_check(result, outliers_threshold(epsilon))]
        if result['label'] == 'radius-approx':
            required = safe_ceil((1.0 - gamma) * n)
            bound = None if optimum is None else (1.0 + epsilon) * optimum
        else:
            required, bound = max(safe_ceil((1.0 - delta - gamma) * n), 1), optimum
        checks.append(_at_least('coverage', self._ball_coverage(ball, kernel), required))
        checks.append(_at_most('size', ball['radius'], bound, source))
        return checks

    def _check_kcenter(self, report: SolveReport) -> list[CheckResult]:
        kernel = kernel_from_report(report)
        gamma = self._gamma_of(report)
        epsilon, delta = report.parameters['epsilon'], report.parameters['delta']
        n = self._points.n
        result = report.result
        centers = tuple(Center.from_dict(c) for c in result['centers'])
        covered = KBallFamily(kernel).contains(self._points, centers, result['radius'])
        planted = self._truth_size({'k-clusters'}, gamma)
        return [
            _at_least('coverage', int(np.count_nonzero(covered)), n - min(safe_ceil((delta + gamma) * n), n - 1)),
            _at_most('size', result['radius'], None if planted is None else (1.0 + epsilon) * planted, 'planted optimum'),
        ]

    def _check_linefit(self, report: SolveReport) -> list[CheckResult]:
        gamma = self._gamma_of(report)
        epsilon, delta = report.parameters['epsilon'], report.parameters['delta']
        n = self._points.n
        result = report.result
        line = LineCenter(np.asarray(result['anchor']), np.asarray(result['direction']))
        covered = SlabFamily().contains(self._points, line, result['width'])
        planted = self._truth_size({'line-with-noise'}, gamma)
        return [
            _at_least('coverage', int(np.count_nonzero(covered)), n - min(safe_ceil((delta + gamma) * n), n - 1)),
            _at_most('size', result['width'], None if planted is None else (1.0 + epsilon) * planted, 'planted width'),
        ]

    def _one_class_projections(self, result: dict, kernel: Kernel) -> np.ndarray:
        if result.get('normal') is not None:
            return self._points.inner(np.asarray(result['normal']))
        combination = Center.from_dict(result['combination'])
        gram = kernel.cross(self._points, None, combination.support)
        return gram @ combination.weights / result['v_norm']

    def _check_svm1(self, report: SolveReport) -> list[CheckResult]:
        kernel = kernel_from_report(report)
        gamma = self._gamma_of(report)
        epsilon, delta = report.parameters['epsilon'], report.parameters['delta']
        n = self._points.n
        result = report.result
        margin = result['margin']
        projections = self._one_class_projections(result, kernel)
        covered = int(np.count_nonzero(projections >= margin - BOUNDARY_SLACK * max(1.0, abs(margin))))
        checks = [_at_least('coverage', covered, n - min(safe_ceil((delta + gamma) * n), n - 1))]

        planted = self._truth_size({'one-class-margin'}, gamma) if kernel.is_linear else None
        if planted is None:
            checks.append(CheckResult('size', None, 'no planted margin available'))
        else:
            rho = 1.0 / planted
            checks.append(CheckResult(
                'size', margin >= (1.0 - epsilon) * rho - SIZE_TOLERANCE,
                f"margin {margin:.9g}, planted margin {rho:.9g}",
            ))
        return checks

    def _check_svm2(self, report: SolveReport) -> list[CheckResult]:
        if self._labels is None:
            return [CheckResult('coverage', None, 'dataset has no class labels')]
        kernel = kernel_from_report(report)
        labels = np.asarray(self._labels)
        first = self._points.subset(np.flatnonzero(labels > 0))
        second = self._points.subset(np.flatnonzero(labels <= 0))
        result = report.result
        t_rank = report.parameters.get('recorded', {}).get('t_rank', [0, 0])

        if result.get('normal') is not None:
            normal = np.asarray(result['normal'])
            proj = (first.inner(normal), second.inner(normal))
        else:
            coefficients = result['coefficients']
            basis = stack_point_sets(first, second)
            support, coef = coefficients['support'], np.asarray(coefficients['coef'])
            proj = tuple(
                kernel.between(cls, None, basis, support) @ coef / result['v_norm'] for cls in (first, second)
            )

        upper, lower = result['upper'], result['lower']
        slack = BOUNDARY_SLACK * max(1.0, abs(upper), abs(lower))
        checks = [
            _at_least('coverage-first', int(np.count_nonzero(proj[0] >= upper - slack)), first.n - t_rank[0]),
            _at_least('coverage-second', int(np.count_nonzero(proj[1] <= lower + slack)), second.n - t_rank[1]),
        ]
        planted = self._truth_size({'two-class-margin'}) if kernel.is_linear else None
        if planted is None:
            checks.append(CheckResult('size', None, 'no planted width available'))
        else:
            epsilon = report.parameters['epsilon']
            checks.append(CheckResult(
                'size', result['width'] >= (1.0 - epsilon) * planted - SIZE_TOLERANCE,
                f"width {result['width']:.9g}, planted width {planted:.9g}",
            ))
        return checks


def all_passed(checks: list[CheckResult]) -> bool:
    """True when no check failed (skipped checks do not count)."""
    return all(check.passed is not False for check in checks)
