"""
Generate controller.

Writes a synthetic dataset (CSV or LIBSVM) and its planted-truth sidecar.
"""

from pathlib import Path

from ..models import SolverConfig, save_dense, save_sparse, save_truth
from ..core import FAMILY_DEFAULTS, generate
from ..utils import get_logger, UsageError, RngStream, detect_format, truth_sidecar_path

logger = get_logger(__name__)

# Command-line flags that map onto family parameters
PARAMETER_FLAGS = ('n', 'd', 'gamma', 'k', 'radius', 'separation', 'width', 'rho',
                   'spread', 'sigma', 'length', 'edge', 'fraction', 'distance')


class GenerateController:
    """Creates dataset files from the instance generator."""

    def __init__(self, config: SolverConfig | None = None):
        self._config = config or SolverConfig()

    def generate(
        self,
        family: str,
        params: dict,
        out: str,
        seed: int = 0,
        fmt: str | None = None
    ) -> dict:
        """
        Generate and write one instance.

        Args:
            family: Generator family name.
            params: Family parameters given on the command line.
            out: Dataset path; the sidecar goes next to it.
            seed: Random seed.
            fmt: 'dense' or 'sparse'; guessed from the extension when None.

        Returns:
            Summary with the written paths and the planted optimum.

        Raises:
            UsageError: For an unknown family or a parameter it does not take.
        """
        if family not in FAMILY_DEFAULTS:
            raise UsageError(f"unknown family '{family}' (choose from {', '.join(FAMILY_DEFAULTS)})")
        unknown = sorted(set(params) - set(FAMILY_DEFAULTS[family]))
        if unknown:
            flags = ', '.join(f"--{name}" for name in unknown)
            raise UsageError(f"family '{family}' does not take {flags}")

        try:
            points, gamma, truth = generate(family, params, RngStream(seed))
        except ValueError as e:
            raise UsageError(str(e)) from e

        fmt = fmt or detect_format(out)
        if fmt == 'sparse':
            labels = truth.extra.get('labels') or [1] * points.n
            save_sparse(points, labels, out)
        else:
            save_dense(points, out)

        sidecar = truth_sidecar_path(out)
        save_truth(truth, gamma, sidecar, truth.extra.get('params'))
        logger.info(f"Wrote {family} instance to {out} (truth: {sidecar})")
        return {
            'dataset': str(Path(out)),
            'truth': str(sidecar),
            'family': family,
            'n': points.n,
            'd': points.d,
            'gamma': gamma,
            'inliers': int(truth.inlier_indices.size),
            'optimum_size': truth.optimum_size,
            'seed': seed,
        }
