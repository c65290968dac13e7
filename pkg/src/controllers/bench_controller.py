"""
Bench controller.

Sweeps algorithms over a grid of generated instances and parameters and
writes one CSV row per (algorithm, n, epsilon, delta, seed).
"""

import itertools
import time
from dataclasses import dataclass, replace
from pathlib import Path

import pandas as pd

from ..models import Center, SolverConfig, RunTrace, SolveReport
from ..core import ContractVerifier, all_passed, center_distances, generate
from ..utils import get_logger, UsageError, RngStream, ordered_map, ensure_parent
from .solve_controller import Dataset, SolveController, SolveSettings

logger = get_logger(__name__)

BASELINE = 'baseline'
# Instance streams are kept apart from solver streams of the same seed
INSTANCE_STREAM = 1

BENCH_COLUMNS = [
    'algorithm', 'family', 'n', 'd', 'gamma', 'epsilon', 'delta', 'seed',
    'points_touched', 'passes_over_data', 'wall_ms', 'size', 'status', 'success',
]


@dataclass(frozen=True)
class BenchCell:
    """One grid point."""
    algorithm: str
    n: int
    epsilon: float
    delta: float
    seed: int


def result_size(report: SolveReport) -> float | None:
    """The headline size of a report's result (radius, width or margin)."""
    result = report.result
    if 'ball' in result:
        return result['ball']['radius']
    for key in ('radius', 'width', 'margin'):
        if key in result:
            return result[key]
    return None


class BenchController:
    """
    Runs benchmark sweeps.

    The baseline algorithm makes one full pass (distances to the first
    point) and returns the resulting 2-approximate ball, so it touches
    exactly n points.
    """

    def __init__(self, config: SolverConfig | None = None):
        self._config = config or SolverConfig()
        self._solver = SolveController(self._config)

    def _run_baseline(self, dataset: Dataset, seed: int) -> SolveReport:
        started = time.time()
        trace = RunTrace()
        center = Center.point(0)
        radius = float(center_distances(dataset.points, center, trace=trace).max())
        return SolveReport.for_run(
            BASELINE,
            dataset.points.digest(),
            seed,
            {},
            {'shape': 'ball', 'center': center.to_dict(), 'radius': radius},
            trace,
            started,
            coverage=dataset.points.n,
        )

    def _run_cell(self, cell: BenchCell, dataset: Dataset, family: str, base: SolveSettings) -> dict:
        settings = replace(base, epsilon=cell.epsilon, delta=cell.delta, seed=cell.seed, verify=False)
        if cell.algorithm == BASELINE:
            report, success = self._run_baseline(dataset, cell.seed), True
        else:
            report = self._solver.solve(cell.algorithm, dataset, settings)
            success = report.status == 'ok'
            if success:
                verifier = ContractVerifier(dataset.points, dataset.labels, dataset.truth, dataset.gamma, self._config)
                success = all_passed(verifier.verify(report))
        logger.debug(f"bench {cell}: touched={report.points_touched}, success={success}")
        return {
            'algorithm': cell.algorithm,
            'family': family,
            'n': dataset.points.n,
            'd': dataset.points.d,
            'gamma': dataset.gamma,
            'epsilon': cell.epsilon,
            'delta': cell.delta,
            'seed': cell.seed,
            'points_touched': report.points_touched,
            'passes_over_data': report.passes,
            'wall_ms': round(report.wall_ms, 3),
            'size': result_size(report),
            'status': report.status,
            'success': success,
        }

    def run(
        self,
        family: str,
        family_params: dict,
        algorithms: list[str],
        ns: list[int],
        epsilons: list[float],
        deltas: list[float],
        seeds: list[int],
        base: SolveSettings | None = None,
        out: str | None = None
    ) -> pd.DataFrame:
        """
        Run the sweep.

        Args:
            family: Instance family.
            family_params: Family parameters other than n.
            algorithms: Algorithm ids, optionally including 'baseline'.
            ns: Instance sizes.
            epsilons: Epsilon grid.
            deltas: Delta grid.
            seeds: Seeds; each seed fixes both the instance and the solver stream.
            base: Settings shared by every run (k, kernel, ...).
            out: CSV path; nothing is written when None.

        Returns:
            One row per grid point, in grid order.

        Raises:
            UsageError: For an unknown algorithm or an invalid instance family.
        """
        base = base or SolveSettings()
        unknown = [a for a in algorithms if a != BASELINE and a not in self._solver.algorithms]
        if unknown:
            raise UsageError(f"unknown algorithms: {', '.join(unknown)}")

        def build(key: tuple[int, int]) -> Dataset:
            n, seed = key
            try:
                points, gamma, truth = generate(family, {**family_params, 'n': n}, RngStream(seed, INSTANCE_STREAM))
            except ValueError as e:
                raise UsageError(str(e)) from e
            labels = truth.extra.get('labels')
            return Dataset(points, labels, truth, gamma, f"{family}:n={n}:seed={seed}")

        workers = self._config.runtime.threads
        keys = list(itertools.product(ns, seeds))
        datasets = dict(zip(keys, ordered_map(build, keys, workers)))

        cells = [
            BenchCell(algorithm, n, epsilon, delta, seed)
            for algorithm, n, epsilon, delta, seed in itertools.product(algorithms, ns, epsilons, deltas, seeds)
        ]
        logger.info(f"Bench: {len(cells)} runs over {len(datasets)} instances of {family}")
        rows = ordered_map(
            lambda cell: self._run_cell(cell, datasets[(cell.n, cell.seed)], family, base),
            cells,
            workers,
        )

        frame = pd.DataFrame(rows, columns=BENCH_COLUMNS)
        if out is not None:
            frame.to_csv(ensure_parent(Path(out)), index=False)
            logger.info(f"Bench results saved to {out}")
        return frame
