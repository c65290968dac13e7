"""
Verify controller.

Checks a saved SolveReport against its dataset and prints a JSON verdict.
"""

import json

from ..models import SolveReport, SolverConfig, to_jsonable
from ..core import ContractVerifier, all_passed
from ..utils import get_logger, UsageError
from .solve_controller import load_dataset

logger = get_logger(__name__)


class VerifyController:
    """Runs the contract checks for one report."""

    def __init__(self, config: SolverConfig | None = None):
        self._config = config or SolverConfig()

    def verify(
        self,
        report_path: str,
        dataset_path: str,
        truth_path: str | None = None,
        fmt: str | None = None,
        has_header: bool = False,
        gamma: float | None = None
    ) -> dict:
        """
        Verify a report file.

        Returns:
            Verdict dictionary with one entry per check and an overall flag.

        Raises:
            UsageError: If the report or dataset cannot be read.
            DigestMismatchError: If the report belongs to another dataset.
        """
        report = SolveReport.load_from_file(report_path)
        if report is None:
            raise UsageError(f"Cannot read report {report_path}")
        dataset = load_dataset(dataset_path, fmt, has_header, truth_path)

        verifier = ContractVerifier(
            dataset.points,
            dataset.labels,
            dataset.truth,
            dataset.gamma if gamma is None else gamma,
            self._config,
        )
        checks = verifier.verify(report)
        passed = all_passed(checks)
        logger.info(f"Verified {report.algorithm} report: {'pass' if passed else 'fail'}")
        return {
            'algorithm': report.algorithm,
            'dataset_digest': verifier.digest,
            'report_digest': report.digest(),
            'checks': [check.to_dict() for check in checks],
            'passed': passed,
        }

    @staticmethod
    def render(verdict: dict) -> str:
        return json.dumps(to_jsonable(verdict), indent=2, sort_keys=True, ensure_ascii=False)
