"""
Solve controller.

Runs one solver on a dataset and assembles its SolveReport. The algorithm
registry is shared by the `solve` command and the benchmark sweep.
"""

import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..models import (
    PointSet,
    PlantedTruth,
    OutlierInstance,
    BiCriteriaParams,
    DatasetLoader,
    SolverConfig,
    RunTrace,
    SolveReport,
    load_truth,
)
from ..core import (
    Kernel,
    ContractVerifier,
    all_passed,
    badoiu_clarkson,
    meb_alg1,
    meb_alg2,
    bicriteria_linear,
    bicriteria_sublinear,
    hybrid_meb,
    hybrid_meb_outliers,
    kcenter_outliers,
    line_fit_outliers,
    svm_one_class_outliers,
    svm_two_class_outliers,
)
from ..utils import get_logger, RefusalError, UsageError, RngStream, truth_sidecar_path

logger = get_logger(__name__)


@dataclass
class SolveSettings:
    """Algorithm parameters gathered from the command line or a bench grid."""
    epsilon: float | None = None
    delta: float | None = None
    beta0: float | None = None
    eta: float = 0.1
    eta1: float | None = None
    k: int | None = None
    s: float | None = None
    gamma: float | None = None
    gamma2: float | None = None
    rounds: int | None = None
    repetitions: int | None = None
    candidate_budget: int | None = None
    sublinear: bool = False
    kernel: Kernel = field(default_factory=Kernel)
    seed: int = 0
    verify: bool = False


@dataclass
class Dataset:
    """A loaded dataset with whatever labels and planted truth came with it."""
    points: PointSet
    labels: list[int] | None = None
    truth: PlantedTruth | None = None
    gamma: float = 0.0
    path: str = ''


def load_dataset(
    path: str,
    fmt: str | None = None,
    has_header: bool = False,
    truth_path: str | None = None
) -> Dataset:
    """
    Load a dataset and its truth sidecar (given, or found next to the file).

    Raises:
        UsageError: If the dataset or an explicitly named sidecar cannot be read.
    """
    loader = DatasetLoader()
    success, message = loader.load(path, fmt, has_header)
    if not success:
        raise UsageError(message)

    truth, gamma = None, 0.0
    sidecar = Path(truth_path) if truth_path else truth_sidecar_path(path)
    if sidecar.is_file():
        try:
            truth, gamma = load_truth(sidecar)
        except (OSError, ValueError, KeyError) as e:
            if truth_path:
                raise UsageError(f"Failed to read truth file {sidecar}: {e}") from e
            logger.warning(f"Ignoring unreadable truth sidecar {sidecar}: {e}")
    elif truth_path:
        raise UsageError(f"Truth file not found: {truth_path}")

    labels = loader.labels
    if labels is None and truth is not None and 'labels' in truth.extra:
        labels = [int(v) for v in truth.extra['labels']]
    if labels is not None and len(labels) != loader.points.n:
        raise UsageError(f"expected {loader.points.n} labels, found {len(labels)}")

    logger.info(f"{message} from {path}" + (f" (truth: {truth.family})" if truth else ""))
    return Dataset(loader.points, labels, truth, gamma, path)


def _require(settings: SolveSettings, algorithm: str, *names: str) -> None:
    missing = [name for name in names if getattr(settings, name) is None]
    if missing:
        flags = ', '.join(f"--{name.replace('_', '-')}" for name in missing)
        raise UsageError(f"algorithm '{algorithm}' needs {flags}")


class SolveController:
    """
    Dispatches solver runs by algorithm id.

    Every runner returns a SolveReport; refusals raised by a solver are
    turned into reports with status 'refused' or 'infeasible'.
    """

    def __init__(self, config: SolverConfig | None = None):
        """
        Initialize solve controller.

        Args:
            config: Solver configuration.
        """
        self._config = config or SolverConfig()
        self._runners = {
            'bc-meb': self._run_bc_meb,
            'meb-alg1': self._run_meb_alg1,
            'meb-alg2': self._run_meb_alg2,
            'outliers-linear': self._run_outliers_linear,
            'outliers-sublinear': self._run_outliers_sublinear,
            'hybrid-meb': self._run_hybrid_meb,
            'hybrid-outliers': self._run_hybrid_outliers,
            'kcenter': self._run_kcenter,
            'linefit': self._run_linefit,
            'svm1': self._run_svm1,
            'svm2': self._run_svm2,
        }

    @property
    def algorithms(self) -> list[str]:
        return list(self._runners)

    @property
    def config(self) -> SolverConfig:
        return self._config

    def solve(self, algorithm: str, dataset: Dataset, settings: SolveSettings) -> SolveReport:
        """
        Run one algorithm.

        Args:
            algorithm: Algorithm id (see `algorithms`).
            dataset: Loaded dataset.
            settings: Algorithm parameters; gamma falls back to the dataset's.

        Returns:
            The run's report, with a verification section when requested.

        Raises:
            UsageError: For an unknown algorithm or missing parameters.
        """
        if algorithm not in self._runners:
            raise UsageError(f"unknown algorithm '{algorithm}' (choose from {', '.join(self._runners)})")
        _require(settings, algorithm, 'epsilon')
        if settings.gamma is None:
            settings = replace(settings, gamma=dataset.gamma)

        logger.info(f"Solving with {algorithm} (seed={settings.seed})")
        try:
            report = self._runners[algorithm](dataset, settings, RngStream(settings.seed))
        except RefusalError as e:
            logger.warning(f"{algorithm} refused: {e}")
            report = SolveReport(
                algorithm=algorithm,
                parameters={'epsilon': settings.epsilon, 'delta': settings.delta, 'gamma': settings.gamma},
                seed=settings.seed,
                dataset_digest=dataset.points.digest(),
                status='infeasible' if e.reason == 'infeasible' else 'refused',
                message=str(e),
            )
            return report

        # Two-class runs digest the class-stacked rows
        report.dataset_digest = dataset.points.digest()
        if settings.verify:
            self._attach_verification(report, dataset, settings)
        return report

    def _attach_verification(self, report: SolveReport, dataset: Dataset, settings: SolveSettings) -> None:
        verifier = ContractVerifier(dataset.points, dataset.labels, dataset.truth, settings.gamma, self._config)
        checks = verifier.verify(report)
        verification = dict(report.verification or {})
        verification.update({'checks': [c.to_dict() for c in checks], 'passed': all_passed(checks)})
        report.verification = verification

    # ----- parameter bundles -----

    def _bicriteria(self, settings: SolveSettings, algorithm: str) -> BiCriteriaParams:
        _require(settings, algorithm, 'delta')
        return BiCriteriaParams(
            epsilon=settings.epsilon,
            delta=settings.delta,
            eta1=settings.eta1 if settings.eta1 is not None else self._config.sampling.eta1,
            z=settings.rounds,
            repetitions=settings.repetitions,
        )

    @staticmethod
    def _instance(dataset: Dataset, settings: SolveSettings) -> OutlierInstance:
        return OutlierInstance(dataset.points, settings.gamma, dataset.truth)

    # ----- runners -----

    def _run_bc_meb(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        started = time.time()
        trace = RunTrace()
        s = settings.s if settings.s is not None else self._config.core_set.s
        ball, state = badoiu_clarkson(
            dataset.points, settings.epsilon, s, settings.kernel, None, self._config.core_set, trace
        )
        return SolveReport.for_run(
            'bc-meb',
            dataset.points.digest(),
            settings.seed,
            {'epsilon': settings.epsilon, 's': s, 'kernel': settings.kernel.to_dict()},
            {**ball.to_dict(), 'core_set': list(state.T), 'rounds': state.iteration},
            trace,
            started,
            coverage=dataset.points.n,
        )

    def _run_meb_alg1(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        _require(settings, 'meb-alg1', 'beta0')
        started = time.time()
        trace = RunTrace()
        ball = meb_alg1(
            dataset.points, settings.epsilon, settings.beta0, settings.eta, rng,
            settings.kernel, self._config.core_set, self._config.sampling, trace
        )
        return SolveReport.for_run(
            'meb-alg1',
            dataset.points.digest(),
            settings.seed,
            {'epsilon': settings.epsilon, 'beta0': settings.beta0, 'eta': settings.eta,
             'kernel': settings.kernel.to_dict()},
            ball.to_dict(),
            trace,
            started,
        )

    def _run_meb_alg2(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        _require(settings, 'meb-alg2', 'beta0')
        started = time.time()
        trace = RunTrace()
        ball = meb_alg2(
            dataset.points, settings.epsilon, settings.beta0, settings.eta, rng,
            settings.kernel, self._config.core_set, trace
        )
        return SolveReport.for_run(
            'meb-alg2',
            dataset.points.digest(),
            settings.seed,
            {'epsilon': settings.epsilon, 'beta0': settings.beta0, 'eta0': settings.eta,
             'kernel': settings.kernel.to_dict()},
            ball.to_dict(),
            trace,
            started,
        )

    def _run_outliers_linear(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        params = self._bicriteria(settings, 'outliers-linear')
        _, report = bicriteria_linear(self._instance(dataset, settings), params, rng, settings.kernel, self._config)
        return report

    def _run_outliers_sublinear(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        params = self._bicriteria(settings, 'outliers-sublinear')
        _, report = bicriteria_sublinear(
            self._instance(dataset, settings), params, rng, settings.kernel, self._config, verify=settings.verify
        )
        return report

    def _run_hybrid_meb(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        _require(settings, 'hybrid-meb', 'delta')
        _, report = hybrid_meb(
            dataset.points, settings.epsilon, settings.delta, rng, settings.kernel, self._config, settings.eta
        )
        return report

    def _run_hybrid_outliers(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        _require(settings, 'hybrid-outliers', 'delta')
        _, report = hybrid_meb_outliers(
            self._instance(dataset, settings), settings.epsilon, settings.delta, rng, settings.kernel, self._config
        )
        return report

    def _run_kcenter(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        _require(settings, 'kcenter', 'k')
        params = self._bicriteria(settings, 'kcenter')
        _, report = kcenter_outliers(
            self._instance(dataset, settings), settings.k, params, rng,
            settings.sublinear, settings.kernel, self._config
        )
        return report

    def _run_linefit(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        params = self._bicriteria(settings, 'linefit')
        if not settings.kernel.is_linear:
            raise UsageError("linefit supports the linear kernel only")
        _, report = line_fit_outliers(
            self._instance(dataset, settings), params, rng,
            settings.candidate_budget, settings.sublinear, self._config
        )
        return report

    def _run_svm1(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        params = self._bicriteria(settings, 'svm1')
        _, report = svm_one_class_outliers(
            self._instance(dataset, settings), params, rng, settings.sublinear, settings.kernel, self._config
        )
        return report

    def _run_svm2(self, dataset: Dataset, settings: SolveSettings, rng: RngStream) -> SolveReport:
        params = self._bicriteria(settings, 'svm2')
        if dataset.labels is None:
            raise UsageError("svm2 needs class labels (a LIBSVM file or a truth sidecar with labels)")
        labels = np.asarray(dataset.labels)
        first_idx, second_idx = np.flatnonzero(labels > 0), np.flatnonzero(labels <= 0)
        if first_idx.size == 0 or second_idx.size == 0:
            raise UsageError("svm2 needs points of both classes")
        gamma2 = settings.gamma2 if settings.gamma2 is not None else settings.gamma
        _, report = svm_two_class_outliers(
            dataset.points.subset(first_idx), dataset.points.subset(second_idx),
            settings.gamma, gamma2, params, rng, settings.sublinear, settings.kernel, self._config
        )
        return report
