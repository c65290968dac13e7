"""
Bi-criteria minimum enclosing ball with outliers.

Both solvers grow a core-set greedily for z rounds and keep every round's
center as a candidate. A round adds a point drawn at random from the far
tail of the current center, which lands in the optimal inlier set with a
fixed probability; independent repetitions boost that probability.

    bicriteria_linear     exact far set and exact rank radius (one pass per round)
    bicriteria_sublinear  uniform-adaptive draws and sandwich estimates only
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from ..models import (
    PointSet,
    Center,
    Ball,
    Candidate,
    OutlierInstance,
    BiCriteriaParams,
    SolverConfig,
    RunTrace,
    SolveReport,
    uniform_sample,
)
from ..utils import (
    get_logger,
    safe_ceil,
    safe_floor,
    exclusion_count,
    top_t,
    kth_smallest,
    argmax_lowest,
    ordered_map,
    RngStream,
)
from .generalized import (
    adaptive_sample_size,
    adaptive_pool_size,
    sandwich_sample_size,
    sandwich_rank,
    generalized_rank,
    generalized_uniform_adaptive,
    generalized_sandwich,
)
from .kernels import Kernel, LINEAR, center_distances
from .meb_core import approx_center
from .shapes import BallFamily

logger = get_logger(__name__)


# ----- primitives -----

def farthest_t(
    points: PointSet,
    center: Center,
    t: int,
    kernel: Kernel = LINEAR,
    trace: RunTrace | None = None
) -> tuple[np.ndarray, float]:
    """
    The t farthest points from the center and the (t+1)-th largest distance.

    Raises:
        ValueError: If t >= n.
    """
    return generalized_rank(points, BallFamily(kernel), center, t, trace=trace)


def uniform_adaptive(
    points: PointSet,
    center: Center,
    gamma: float,
    delta: float,
    eta1: float,
    rng: RngStream,
    kernel: Kernel = LINEAR,
    c2: float = 1.0,
    trace: RunTrace | None = None
) -> int:
    """Uniform-adaptive draw of the next core-set point (ball distances)."""
    return generalized_uniform_adaptive(
        points, BallFamily(kernel), center, gamma, delta, eta1, rng, c2, trace
    )


def sandwich_estimate(
    points: PointSet,
    center: Center,
    gamma: float,
    delta: float,
    eta2: float,
    rng: RngStream,
    kernel: Kernel = LINEAR,
    c3: float = 1.0,
    trace: RunTrace | None = None
) -> float:
    """Sandwich estimate of the rank radius (ball distances)."""
    return generalized_sandwich(
        points, BallFamily(kernel), center, gamma, delta, eta2, rng, c3, trace
    )


# ----- repetition schedules -----

def _capped_power(log_value: float, cap: int | None) -> int:
    if cap is not None and log_value >= math.log(cap):
        return int(cap)
    return max(1, safe_ceil(math.exp(min(log_value, 700.0))))


def linear_repetition_count(gamma: float, delta: float, z: int, cap: int | None = None) -> int:
    """N = ceil((1 / (1 - gamma)) (1 + gamma / delta)^z), optionally capped."""
    log_value = z * math.log1p(gamma / delta) - math.log1p(-gamma)
    return _capped_power(log_value, cap)


def sublinear_repetition_count(
    gamma: float,
    delta: float,
    eta1: float,
    z: int,
    cap: int | None = None
) -> int:
    """
    N = ceil((1 / (1 - gamma)) ((1 / (1 - eta1)) (3 + 3 gamma / delta))^z),
    with delta already the substituted delta / 5.
    """
    base = (3.0 + 3.0 * gamma / delta) / (1.0 - eta1)
    log_value = z * math.log(base) - math.log1p(-gamma)
    return _capped_power(log_value, cap)


def scheduled_repetitions(
    params: BiCriteriaParams,
    gamma: float,
    delta: float,
    z: int,
    sublinear: bool,
    config: SolverConfig,
    trace: RunTrace
) -> int:
    """
    Explicit repetitions, or the schedule for z far-set draws per run.

    delta is the substituted delta / 5 in sublinear mode. Flags
    'repetitions-capped' when the schedule hits the configured cap.
    """
    if params.repetitions is not None:
        return params.repetitions
    cap = config.outliers.max_repetitions
    if sublinear:
        repetitions = sublinear_repetition_count(gamma, delta, params.eta1, z, cap=cap)
    else:
        repetitions = linear_repetition_count(gamma, delta, z, cap=cap)
    if repetitions == cap:
        trace.flag('repetitions-capped')
    return repetitions


# ----- solvers -----

@dataclass
class RepetitionOutcome:
    """Best candidate of one repetition plus its work counters."""
    candidate: Candidate
    trace: RunTrace
    coverage: int | None = None
    centers: list[Center] | None = None


def _pick_best(outcomes: list[RepetitionOutcome]) -> RepetitionOutcome:
    return min(
        outcomes,
        key=lambda o: (o.candidate.size_estimate, o.candidate.repetition, o.candidate.round)
    )


def linear_repetition(
    points: PointSet,
    t: int,
    z: int,
    xi: float,
    kernel: Kernel,
    config: SolverConfig,
    rng: RngStream,
    repetition: int = 0
) -> RepetitionOutcome:
    """One run of the exact greedy loop; each round costs one full pass."""
    trace = RunTrace()
    family = BallFamily(kernel)
    T = [rng.index(points.n)]
    best: tuple[Candidate, int] | None = None

    for round_index in range(1, z + 1):
        center = approx_center(points, T, xi, kernel, config.core_set)
        dist = family.f_values(points, center, None, trace)
        Q, l = top_t(dist, t)
        coverage = int(np.count_nonzero(dist <= l))
        if best is None or l < best[0].size_estimate:
            best = (Candidate(center, l, round_index, repetition), coverage)
        if round_index < z:
            # t = 0: the farthest point
            T.append(int(Q[rng.index(Q.size)]) if Q.size else argmax_lowest(dist))

    return RepetitionOutcome(best[0], trace, coverage=best[1])


def sublinear_repetition(
    points: PointSet,
    gamma: float,
    delta: float,
    eta1: float,
    eta2: float | None,
    z: int,
    xi: float,
    kernel: Kernel,
    config: SolverConfig,
    rng: RngStream,
    repetition: int = 0
) -> RepetitionOutcome:
    """
    One run of the sampling greedy loop.

    With eta2 None no sizes are estimated and only the round centers are
    collected (candidate generation for the hybrid solver).
    """
    trace = RunTrace()
    sampling = config.sampling
    T = [rng.index(points.n)]
    centers: list[Center] = []
    best: Candidate | None = None

    for round_index in range(1, z + 1):
        center = approx_center(points, T, xi, kernel, config.core_set)
        centers.append(center)
        if eta2 is not None:
            estimate = sandwich_estimate(
                points, center, gamma, delta, eta2, rng, kernel, sampling.c3, trace
            )
            if best is None or estimate < best.size_estimate:
                best = Candidate(center, estimate, round_index, repetition)
        if round_index < z:
            T.append(uniform_adaptive(
                points, center, gamma, delta, eta1, rng, kernel, sampling.c2, trace
            ))

    if best is None:
        best = Candidate(centers[-1], 0.0, z, repetition)
    return RepetitionOutcome(best, trace, centers=centers)


def _report_parameters(inst: OutlierInstance, params: BiCriteriaParams, kernel: Kernel, **extra) -> dict:
    return {
        'gamma': inst.gamma,
        **params.to_dict(),
        'kernel': kernel.to_dict(),
        **extra,
    }


def bicriteria_linear(
    inst: OutlierInstance,
    params: BiCriteriaParams,
    rng: RngStream,
    kernel: Kernel = LINEAR,
    config: SolverConfig | None = None
) -> tuple[Ball, SolveReport]:
    """
    (1 + eps, 1 - delta) bi-criteria MEB with outliers in linear time.

    Runs N repetitions of the z-round greedy loop with
    t = (n - ceil((1 - gamma) n)) + floor(delta n), s = eps / (2 + eps) and
    xi = s eps / (1 + eps); returns the candidate with the smallest
    (t+1)-th largest distance. The returned ball covers at least n - t points.
    """
    started = time.time()
    config = config or SolverConfig()
    points = inst.points
    epsilon, delta, gamma = params.epsilon, params.delta, inst.gamma

    z = params.rounds
    s = epsilon / (2.0 + epsilon)
    xi = s * epsilon / (1.0 + epsilon)
    t = exclusion_count(points.n, gamma, delta)

    trace = RunTrace()
    if inst.outlier_count + safe_floor(delta * points.n) >= points.n:
        trace.flag('t-clamped')
        logger.warning(f"outliers plus floor(delta n) reach n; excluding t={t} points")

    repetitions = scheduled_repetitions(params, gamma, delta, z, False, config, trace)
    logger.info(
        f"bicriteria_linear: n={points.n}, z={z}, t={t}, repetitions={repetitions}"
    )

    outcomes = ordered_map(
        lambda rep: linear_repetition(points, t, z, xi, kernel, config, rng.child(rep), rep),
        range(repetitions),
        config.runtime.threads,
    )
    for outcome in outcomes:
        trace.merge(outcome.trace)
    best = _pick_best(outcomes)

    ball = Ball(best.candidate.center, best.candidate.size_estimate)
    trace.notes.update({'t': t, 'xi': xi, 's': s, 'repetitions': repetitions})
    report = SolveReport.for_run(
        'outliers-linear',
        points.digest(),
        rng.seed,
        _report_parameters(inst, params, kernel, repetitions=repetitions),
        {**ball.to_dict(), 'round': best.candidate.round, 'repetition': best.candidate.repetition},
        trace,
        started,
        coverage=best.coverage,
    )
    logger.info(f"bicriteria_linear: radius={ball.radius:.6g}, coverage={best.coverage}")
    return ball, report


def full_coverage(points: PointSet, center: Center, radius: float, inlier_count: int, kernel: Kernel) -> dict:
    """One verification pass: true coverage and the radius covering the inlier count."""
    trace = RunTrace()
    dist = center_distances(points, center, kernel, None, trace)
    return {
        'coverage': int(np.count_nonzero(dist <= radius * (1.0 + 1e-12))),
        'radius_at_full_coverage': kth_smallest(dist, inlier_count),
        'points_touched': trace.points_touched,
        'passes': trace.full_passes,
    }


def bicriteria_sublinear(
    inst: OutlierInstance,
    params: BiCriteriaParams,
    rng: RngStream,
    kernel: Kernel = LINEAR,
    config: SolverConfig | None = None,
    verify: bool = False
) -> tuple[Ball, SolveReport]:
    """
    Sublinear (1 + eps, 1 - delta) bi-criteria MEB with outliers.

    As bicriteria_linear, but with delta replaced by delta / 5: each round's
    new point comes from uniform_adaptive() and each candidate's radius from
    sandwich_estimate() with eta2 = c / (z N). The work does not depend on n.

    Args:
        verify: Add one full pass reporting true coverage (kept out of the
            algorithm's own counters).
    """
    started = time.time()
    config = config or SolverConfig()
    points = inst.points
    epsilon, gamma = params.epsilon, inst.gamma
    delta = params.delta / 5.0
    z = params.rounds
    s = epsilon / (2.0 + epsilon)
    xi = s * epsilon / (1.0 + epsilon)
    eta1 = params.eta1

    if gamma == 0.0:
        ball, report = _sublinear_without_outliers(inst, params, rng, kernel, config, started)
    else:
        if not delta < gamma / 3.0:
            raise ValueError(
                f"the sublinear solver needs delta / 5 < gamma / 3 (delta={params.delta}, gamma={gamma})"
            )
        trace = RunTrace()
        repetitions = scheduled_repetitions(params, gamma, delta, z, True, config, trace)
        eta2 = params.eta2 or min(config.sampling.eta2_constant / (z * repetitions), 0.5)

        n_prime = adaptive_sample_size(delta, eta1, config.sampling.c2)
        n_double_prime = sandwich_sample_size(gamma, delta, eta2, config.sampling.c3)
        trace.notes.update({
            'delta_substituted': delta,
            'eta2': eta2,
            'repetitions': repetitions,
            'n_prime': n_prime,
            't_prime': adaptive_pool_size(gamma, delta, n_prime),
            'n_double_prime': n_double_prime,
            'sandwich_rank': sandwich_rank(gamma, delta, n_double_prime),
        })
        logger.info(
            f"bicriteria_sublinear: z={z}, repetitions={repetitions}, "
            f"n'={n_prime}, n''={n_double_prime}"
        )

        outcomes = ordered_map(
            lambda rep: sublinear_repetition(
                points, gamma, delta, eta1, eta2, z, xi, kernel, config, rng.child(rep), rep
            ),
            range(repetitions),
            config.runtime.threads,
        )
        for outcome in outcomes:
            trace.merge(outcome.trace)
        best = _pick_best(outcomes)

        ball = Ball(best.candidate.center, best.candidate.size_estimate)
        report = SolveReport.for_run(
            'outliers-sublinear',
            points.digest(),
            rng.seed,
            _report_parameters(inst, params, kernel, repetitions=repetitions, eta2=eta2),
            {**ball.to_dict(), 'round': best.candidate.round, 'repetition': best.candidate.repetition},
            trace,
            started,
        )

    if verify:
        verification = full_coverage(points, ball.center, ball.radius, inst.inlier_count, kernel)
        report.verification = verification
        report.coverage = verification['coverage']
    logger.info(f"bicriteria_sublinear: radius={ball.radius:.6g}")
    return ball, report


def _sublinear_without_outliers(
    inst: OutlierInstance,
    params: BiCriteriaParams,
    rng: RngStream,
    kernel: Kernel,
    config: SolverConfig,
    started: float
) -> tuple[Ball, SolveReport]:
    """gamma = 0: run the exact solver on one uniform sample of n' points."""
    points = inst.points
    n_prime = adaptive_sample_size(params.delta / 5.0, params.eta1, config.sampling.c2)
    sample = uniform_sample(points, n_prime, rng)
    logger.warning(f"gamma = 0: running the exact solver on a sample of {n_prime} points")

    sub_inst = OutlierInstance(points.subset(sample), 0.0)
    sub_ball, sub_report = bicriteria_linear(sub_inst, params, rng.child(0), kernel, config)

    center = sub_ball.center
    if not center.is_explicit:
        center = Center.combination(sample[center.support], center.weights)
    ball = Ball(center, sub_ball.radius)

    trace = RunTrace(points_touched=sub_report.points_touched)
    trace.add_sample('n_prime', n_prime)
    trace.flag('degenerate-gamma')
    for name in sub_report.flags:
        trace.flag(name)
    report = SolveReport.for_run(
        'outliers-sublinear',
        points.digest(),
        rng.seed,
        _report_parameters(inst, params, kernel, repetitions=sub_report.parameters.get('repetitions')),
        ball.to_dict(),
        trace,
        started,
    )
    return ball, report
