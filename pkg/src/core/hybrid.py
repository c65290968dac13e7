"""
Hybrid radius-or-covering approximation.

Without any stability assumption, the hybrid solvers return either a
radius approximation or a covering approximation and say which. The label
comes from comparing two radii computed from samples plus a single pass
over the data, and it yields a one-sided bound on how stable the instance is.
"""

import math
import time

import numpy as np

from ..models import (
    PointSet,
    Ball,
    Center,
    OutlierInstance,
    BiCriteriaParams,
    HybridResult,
    StabilityBound,
    SolverConfig,
    RunTrace,
    SolveReport,
)
from ..utils import get_logger, safe_ceil, ordered_map, RngStream
from .kernels import Kernel, LINEAR, center_distances
from .meb_outliers import bicriteria_sublinear, sublinear_repetition
from .stable_meb import meb_alg2

logger = get_logger(__name__)

OUTLIER_STABILITY_CONSTANT = (2.0 * math.sqrt(2.0) + math.sqrt(3.0)) ** 2


def meb_threshold(epsilon: float) -> float:
    """Ratio threshold (1 + eps) / (1 - eps^2 / 2)."""
    return (1.0 + epsilon) / (1.0 - epsilon ** 2 / 2.0)


def outlier_radius_error(epsilon: float) -> float:
    """Candidate radius error eps^2 / (2 (2 sqrt2 + sqrt3)^2)."""
    return epsilon ** 2 / (2.0 * OUTLIER_STABILITY_CONSTANT)


def outliers_threshold(epsilon: float) -> float:
    """Ratio threshold (1 + eps) / (1 - eps^2 / (2 (2 sqrt2 + sqrt3)^2))."""
    return (1.0 + epsilon) / (1.0 - outlier_radius_error(epsilon))


def radius_ratio(numerator: float, denominator: float) -> float:
    """numerator / denominator with 0/0 defined as 1."""
    if denominator == 0.0:
        return 1.0 if numerator == 0.0 else float('inf')
    return numerator / denominator


def label_for(ratio: float, threshold: float) -> str:
    return 'radius-approx' if ratio <= threshold else 'covering-approx'


def infer_stability(result: HybridResult, epsilon: float) -> StabilityBound:
    """
    One-sided bound on the stability level alpha-hat implied by a label.

    A radius-approx label means alpha-hat < eps; a covering-approx label
    means alpha-hat > eps^2 / 2 (for the outliers variant,
    alpha-hat > eps^2 / (2 (2 sqrt2 + sqrt3)^2)).

    Raises:
        ValueError: If epsilon differs from the one the result was built with.
    """
    if not math.isclose(result.epsilon, epsilon, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError(f"result was computed with epsilon={result.epsilon}, not {epsilon}")

    if result.label == 'radius-approx':
        return StabilityBound('upper', epsilon)
    if result.variant == 'outliers':
        return StabilityBound('lower', outlier_radius_error(epsilon))
    return StabilityBound('lower', epsilon ** 2 / 2.0)


def capped_rounds(inner_epsilon: float, config: SolverConfig, trace: RunTrace) -> int:
    """z = ceil(2 / eps') + 1, cut to hybrid.max_rounds with a 'rounds-capped' flag."""
    rounds = safe_ceil(2.0 / inner_epsilon) + 1
    if rounds > config.hybrid.max_rounds:
        trace.flag('rounds-capped')
        logger.warning(f"hybrid: {rounds} rounds capped at {config.hybrid.max_rounds}")
        trace.notes['uncapped_rounds'] = rounds
        return config.hybrid.max_rounds
    return rounds


def _finish(result: HybridResult, epsilon: float) -> HybridResult:
    result.stability_bound = infer_stability(result, epsilon)
    return result


def hybrid_meb(
    points: PointSet,
    epsilon: float,
    delta: float,
    rng: RngStream,
    kernel: Kernel = LINEAR,
    config: SolverConfig | None = None,
    eta0: float = 0.1
) -> tuple[HybridResult, SolveReport]:
    """
    Radius-or-covering MEB from samples and one pass.

    1. Bi-criteria (1 + eps^2/2, 1 - delta/2) ball B(c, r_c) on (P, delta/2).
    2. Center o~ from the binary-search solver assuming (eps^2, delta/2)
       stability.
    3. r_o = max distance to o~ (the single pass).
    4. Label radius-approx when r_o / r_c <= (1 + eps) / (1 - eps^2 / 2).
    """
    if not 0.0 < epsilon < 1.0 or not 0.0 < delta < 1.0:
        raise ValueError(f"epsilon and delta must lie in (0, 1), got {epsilon}, {delta}")
    started = time.time()
    config = config or SolverConfig()
    trace = RunTrace()

    inner_epsilon = epsilon ** 2 / 2.0
    rounds = capped_rounds(inner_epsilon, config, trace)
    params = BiCriteriaParams(
        epsilon=inner_epsilon,
        delta=delta / 2.0,
        eta1=config.sampling.eta1,
        z=rounds,
        repetitions=config.hybrid.repetitions,
    )
    ball_c, report_c = bicriteria_sublinear(
        OutlierInstance(points, delta / 2.0), params, rng.child(0), kernel, config
    )
    r_c = ball_c.radius
    trace.points_touched += report_c.points_touched
    for name in report_c.flags:
        trace.flag(name)

    stable_trace = RunTrace()
    ball_o = meb_alg2(points, epsilon, delta / 2.0, eta0, rng.child(1), kernel, config.core_set, stable_trace)
    trace.merge(stable_trace)

    r_o = float(center_distances(points, ball_o.center, kernel, None, trace).max())

    ratio = radius_ratio(r_o, r_c)
    threshold = meb_threshold(epsilon)
    label = label_for(ratio, threshold)
    ball = Ball(ball_o.center, r_o) if label == 'radius-approx' else ball_c

    result = _finish(HybridResult(
        ball=ball,
        label=label,
        ratio=ratio,
        threshold=threshold,
        epsilon=epsilon,
        variant='meb',
        details={'r_c': r_c, 'r_o': r_o},
    ), epsilon)
    logger.info(f"hybrid_meb: r_c={r_c:.6g}, r_o={r_o:.6g}, ratio={ratio:.4f}, label={label}")

    report = SolveReport.for_run(
        'hybrid-meb',
        points.digest(),
        rng.seed,
        {'epsilon': epsilon, 'delta': delta, 'eta0': eta0, 'rounds': rounds,
         'repetitions': config.hybrid.repetitions, 'kernel': kernel.to_dict()},
        result.to_dict(),
        trace,
        started,
    )
    return result, report


def rank_radii_one_pass(
    points: PointSet,
    centers: list[Center],
    small_ranks: tuple[int, ...],
    kernel: Kernel = LINEAR,
    chunk_size: int = 4096,
    trace: RunTrace | None = None
) -> tuple[np.ndarray, int]:
    """
    k-th smallest distances from every center, in one chunked pass.

    For each center only the m largest distances seen so far are kept, with
    m = n - min(small_ranks) + 1, which is enough to read off any of the
    requested k-th smallest values at the end.

    Args:
        points: Point set.
        centers: Candidate centers.
        small_ranks: 1-based ranks k (k-th smallest distance).
        kernel: Feature space.
        chunk_size: Rows per chunk.
        trace: Charged with exactly one full pass.

    Returns:
        (radii, m): radii[j, r] is the small_ranks[r]-th smallest distance
        from centers[j]; m is the per-center buffer length.
    """
    n = points.n
    m = n - min(small_ranks) + 1
    if kernel.is_linear:
        centers = [Center.explicit(c.to_vector(points)) for c in centers]

    buffers = [np.empty(0) for _ in centers]
    for start in range(0, n, chunk_size):
        chunk = np.arange(start, min(start + chunk_size, n))
        for j, center in enumerate(centers):
            merged = np.concatenate([buffers[j], center_distances(points, center, kernel, chunk)])
            if merged.size > m:
                merged = np.partition(merged, merged.size - m)[merged.size - m:]
            buffers[j] = merged
    if trace is not None:
        trace.touch(n, full=True)

    radii = np.empty((len(centers), len(small_ranks)))
    for j, buffer in enumerate(buffers):
        for r, k in enumerate(small_ranks):
            largest_rank = n - k + 1
            radii[j, r] = np.partition(buffer, buffer.size - largest_rank)[buffer.size - largest_rank]
    return radii, m


def hybrid_meb_outliers(
    inst: OutlierInstance,
    epsilon: float,
    delta: float,
    rng: RngStream,
    kernel: Kernel = LINEAR,
    config: SolverConfig | None = None
) -> tuple[HybridResult, SolveReport]:
    """
    Radius-or-covering MEB with outliers.

    Candidate centers come from the sampling greedy loop run at radius error
    eps^2 / (2 (2 sqrt2 + sqrt3)^2). One pass computes, per candidate q,
    r_q (the ceil((1 - gamma) n)-th smallest distance) and r'_q (the
    ceil((1 - delta - gamma) n)-th smallest). With s1 = argmin r_q and
    s2 = argmin r'_q, the label is radius-approx when
    r_s1 / r'_s2 <= (1 + eps) / (1 - eps^2 / (2 (2 sqrt2 + sqrt3)^2)).
    """
    if not 0.0 < epsilon < 1.0 or not 0.0 < delta < 1.0:
        raise ValueError(f"epsilon and delta must lie in (0, 1), got {epsilon}, {delta}")
    started = time.time()
    config = config or SolverConfig()
    points, gamma = inst.points, inst.gamma
    n = points.n

    eps_small = outlier_radius_error(epsilon)
    s = eps_small / (2.0 + eps_small)
    xi = s * eps_small / (1.0 + eps_small)
    trace = RunTrace()
    rounds = capped_rounds(eps_small, config, trace)
    repetitions = config.hybrid.repetitions
    sub_delta = delta / 5.0

    outcomes = ordered_map(
        lambda rep: sublinear_repetition(
            points, gamma, sub_delta, config.sampling.eta1, None, rounds, xi,
            kernel, config, rng.child(rep), rep
        ),
        range(repetitions),
        config.runtime.threads,
    )
    candidates: list[Center] = []
    for outcome in outcomes:
        trace.merge(outcome.trace)
        candidates.extend(outcome.centers)
    if len(candidates) > config.hybrid.max_candidates:
        trace.flag('candidates-capped')
        candidates = candidates[:config.hybrid.max_candidates]

    k_cover = safe_ceil((1.0 - gamma) * n)
    k_relaxed = max(safe_ceil((1.0 - delta - gamma) * n), 1)
    radii, buffer_length = rank_radii_one_pass(
        points, candidates, (k_cover, k_relaxed), kernel, config.hybrid.chunk_size, trace
    )
    s1 = int(np.argmin(radii[:, 0]))
    s2 = int(np.argmin(radii[:, 1]))
    r_s1, r_s2 = float(radii[s1, 0]), float(radii[s2, 1])

    ratio = radius_ratio(r_s1, r_s2)
    threshold = outliers_threshold(epsilon)
    label = label_for(ratio, threshold)
    ball = Ball(candidates[s1], r_s1) if label == 'radius-approx' else Ball(candidates[s2], r_s2)

    result = _finish(HybridResult(
        ball=ball,
        label=label,
        ratio=ratio,
        threshold=threshold,
        epsilon=epsilon,
        variant='outliers',
        details={
            'r_s1': r_s1,
            'r_prime_s2': r_s2,
            'candidate_count': len(candidates),
            'buffer_length': buffer_length,
        },
    ), epsilon)
    trace.notes.update({'candidate_count': len(candidates), 'buffer_length': buffer_length})
    logger.info(
        f"hybrid_meb_outliers: {len(candidates)} candidates, ratio={ratio:.4f}, label={label}"
    )

    report = SolveReport.for_run(
        'hybrid-outliers',
        points.digest(),
        rng.seed,
        {'epsilon': epsilon, 'delta': delta, 'gamma': gamma, 'rounds': rounds,
         'repetitions': repetitions, 'kernel': kernel.to_dict()},
        result.to_dict(),
        trace,
        started,
    )
    return result, report
