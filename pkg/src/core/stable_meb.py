"""
Sublinear MEB on stable instances.

An instance is (alpha, beta)-stable when removing fewer than beta * n points
cannot shrink its MEB radius by a (1 - alpha) factor. With alpha = eps^2 and
a known lower bound beta0 < beta, the solvers below read only a sample whose
size does not depend on n:

    meb_alg1     one sample, core-set MEB of the sample, then expansion.
    radius_range a constant-factor interval for Rad(P) from one sample.
    test_h       a yes/no oracle for a guessed radius h.
    meb_alg2     binary search of test_h over a geometric grid.
"""

import math

from ..models import (
    PointSet,
    Center,
    Ball,
    RadiusInterval,
    StabilityParams,
    CoreSetConfig,
    SamplingConfig,
    RunTrace,
    uniform_sample,
)
from ..utils import get_logger, safe_ceil, RngStream
from .kernels import Kernel, LINEAR
from .meb_core import approx_center, badoiu_clarkson, farthest_point

logger = get_logger(__name__)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)


# ----- closed forms -----

def alg1_sample_size(d: int, beta0: float, eta: float, c1: float = 1.0) -> int:
    """m = ceil((c1 / beta0) * max(ln(1/eta), d * ln(d / beta0)))."""
    return safe_ceil((c1 / beta0) * max(math.log(1.0 / eta), d * math.log(d / beta0)))


def alg1_expansion_factor(epsilon: float) -> float:
    """(1 + (2 sqrt2 + sqrt3) eps) / (1 - eps^2)."""
    return (1.0 + (2.0 * SQRT2 + SQRT3) * epsilon) / (1.0 - epsilon ** 2)


def alg1_lambda(epsilon: float) -> float:
    """Radius ratio guaranteed by meb_alg1 on stable inputs."""
    return alg1_expansion_factor(epsilon) * (1.0 + epsilon ** 2)


def radius_interval_from_distance(distance: float, epsilon: float) -> RadiusInterval:
    """[D / 2, D / (1 - eps^2)] for the sampled distance D."""
    if distance <= 0.0:
        return RadiusInterval(0.0, 0.0, degenerate=True)
    return RadiusInterval(distance / 2.0, distance / (1.0 - epsilon ** 2))


def grid_length(epsilon: float) -> int:
    """w = ceil(log_{1+eps^2}(2 / (1 - eps^2)^2)) + 1."""
    e2 = epsilon ** 2
    return safe_ceil(math.log(2.0 / (1.0 - e2) ** 2) / math.log1p(e2)) + 1


def alg2_radius_factor(epsilon: float) -> float:
    """r / h = (1 + (2 sqrt2 + 2 sqrt6 / sqrt(1 - eps^2)) eps) / (1 + eps^2)."""
    return (1.0 + alg2_center_error(epsilon)) / (1.0 + epsilon ** 2)


def alg2_center_error(epsilon: float) -> float:
    """x2 = (2 sqrt2 + 2 sqrt6 / sqrt(1 - eps^2)) eps."""
    return (2.0 * SQRT2 + 2.0 * SQRT6 / math.sqrt(1.0 - epsilon ** 2)) * epsilon


def alg2_lambda(epsilon: float) -> float:
    """(1 + x1)(1 + x2) / (1 + eps^2) with x1 = 8 eps^2 / (1 - eps^2)."""
    x1 = 8.0 * epsilon ** 2 / (1.0 - epsilon ** 2)
    return (1.0 + x1) * (1.0 + alg2_center_error(epsilon)) / (1.0 + epsilon ** 2)


def center_deviation_bound(epsilon: float, epsilon_prime: float) -> float:
    """
    Relative distance bound between a near-optimal center and the MEB center.

    On an (eps^2, beta)-stable instance, a ball of radius at most
    (1 + eps'^2) Rad(P) covering at least (1 - beta0) n points has its center
    within (2 sqrt2 eps + sqrt3 eps') Rad(P) of the optimal center.
    """
    return 2.0 * SQRT2 * epsilon + SQRT3 * epsilon_prime


def oracle_sample_size(z: int, beta0: float, eta: float) -> int:
    """Per-round sample size ceil((1 / beta0) ln(z / eta))."""
    return safe_ceil(math.log(z / eta) / beta0)


# ----- operations -----

def radius_range(
    points: PointSet,
    beta0: float,
    eta: float,
    rng: RngStream,
    epsilon: float,
    kernel: Kernel = LINEAR,
    trace: RunTrace | None = None
) -> RadiusInterval:
    """
    Interval containing Rad(P) with probability >= 1 - eta on stable inputs.

    Picks p1 uniformly, samples ceil((1/beta0) ln(1/eta)) points and takes the
    one farthest from p1 as p2.

    Returns:
        RadiusInterval; degenerate [0, 0] when n < 2 or ||p1 - p2|| = 0.
    """
    if not 0.0 < beta0 < 1.0 or not 0.0 < eta < 1.0:
        raise ValueError(f"beta0 and eta must lie in (0, 1), got {beta0}, {eta}")

    if points.n < 2:
        logger.warning("radius_range on a single point: degenerate interval")
        if trace is not None:
            trace.flag('degenerate-interval')
        return RadiusInterval(0.0, 0.0, degenerate=True)

    p1 = rng.index(points.n)
    m = safe_ceil(math.log(1.0 / eta) / beta0)
    sample = uniform_sample(points, m, rng)
    if trace is not None:
        trace.add_sample('radius_range', m)
    _, distance = farthest_point(points, Center.point(p1), kernel, sample, trace)

    interval = radius_interval_from_distance(distance, epsilon)
    if interval.degenerate:
        logger.warning("All sampled points coincide with p1: degenerate interval")
        if trace is not None:
            trace.flag('degenerate-interval')
    return interval


def meb_alg1(
    points: PointSet,
    epsilon: float,
    beta0: float,
    eta: float,
    rng: RngStream,
    kernel: Kernel = LINEAR,
    core_config: CoreSetConfig | None = None,
    sampling: SamplingConfig | None = None,
    trace: RunTrace | None = None
) -> Ball:
    """
    Sample-and-expand MEB for (eps^2, beta)-stable instances.

    Computes a (1 + eps^2)-approximate MEB B(c, r) of a uniform sample and
    returns B(c, r * (1 + (2 sqrt2 + sqrt3) eps) / (1 - eps^2)).
    """
    StabilityParams(epsilon, beta0, eta)
    sampling = sampling or SamplingConfig()

    m = alg1_sample_size(points.d, beta0, eta, sampling.c1)
    sample = uniform_sample(points, m, rng)
    if trace is not None:
        trace.add_sample('alg1_sample', m)
    logger.info(f"meb_alg1: sample size {m} (n={points.n}, d={points.d})")

    ball, _ = badoiu_clarkson(
        points,
        epsilon ** 2,
        s=(core_config or CoreSetConfig()).s,
        kernel=kernel,
        idx=sample,
        config=core_config,
        trace=trace,
    )
    return Ball(ball.center, ball.radius * alg1_expansion_factor(epsilon))


def test_h(
    points: PointSet,
    h: float,
    z: int,
    beta0: float,
    eta: float,
    rng: RngStream,
    epsilon: float,
    kernel: Kernel = LINEAR,
    core_config: CoreSetConfig | None = None,
    trace: RunTrace | None = None
) -> tuple[bool, Center]:
    """
    Decide whether h is a feasible radius guess.

    Runs up to z greedy rounds. Each round computes an approximate center of
    T (core-set accuracy with eps replaced by eps^2 and s = 1/3), samples
    ceil((1/beta0) ln(z/eta)) points and answers yes as soon as the farthest
    sampled point is closer than h; otherwise that point joins T.

    Returns:
        (verdict, last center).
    """
    if z < 1:
        raise ValueError(f"z must be >= 1, got {z}")
    if h < 0:
        raise ValueError(f"h must be non-negative, got {h}")

    e2 = epsilon ** 2
    xi = (1.0 / 3.0) * e2 / (1.0 + e2)
    q = oracle_sample_size(z, beta0, eta)
    if trace is not None:
        trace.add_sample('test_h', q)

    T = [rng.index(points.n)]
    center = Center.point(T[0])
    for round_index in range(1, z + 1):
        center = approx_center(points, T, xi, kernel, core_config)
        sample = uniform_sample(points, q, rng)
        far_index, far_dist = farthest_point(points, center, kernel, sample, trace)
        if far_dist < h:
            logger.debug(f"test_h(h={h:.6g}): yes in round {round_index}")
            return True, center
        T.append(far_index)

    logger.debug(f"test_h(h={h:.6g}): no after {z} rounds")
    return False, center


test_h.__test__ = False


def meb_alg2(
    points: PointSet,
    epsilon: float,
    beta0: float,
    eta0: float,
    rng: RngStream,
    kernel: Kernel = LINEAR,
    core_config: CoreSetConfig | None = None,
    trace: RunTrace | None = None
) -> Ball:
    """
    Binary search over radius guesses with the test_h oracle.

    Flags written to the trace: 'all-yes' / 'all-no' when the search ran off
    an end of the grid, 'inconsistent-answers' when a yes was seen below a no,
    'alg1-fallback' when the sampled radius interval was degenerate on n >= 2
    points and meb_alg1 supplied the ball.
    """
    StabilityParams(epsilon, beta0, eta0)
    trace = trace if trace is not None else RunTrace()

    interval = radius_range(points, beta0, eta0 / 2.0, rng, epsilon, kernel, trace)
    if interval.degenerate:
        if points.n < 2:
            return Ball(Center.point(0), 0.0)
        # the sample saw a single location; P may still spread out
        trace.flag('alg1-fallback')
        logger.warning("meb_alg2: degenerate radius interval; returning the sample-and-expand ball")
        return meb_alg1(points, epsilon, beta0, eta0 / 2.0, rng, kernel, core_config, trace=trace)

    e2 = epsilon ** 2
    a = interval.a
    w = grid_length(epsilon)
    z = safe_ceil(3.0 / e2)
    query_eta = eta0 / (2.0 * max(math.log2(w), 1.0))
    trace.notes['grid_length'] = w

    def grid(k: int) -> float:
        return (1.0 + e2) ** k * (1.0 - e2) * a

    verdicts: dict[int, bool] = {}
    # grid levels are 0 .. w - 1; lo = -1 and hi = w are never tested
    lo, hi = -1, w
    while hi - lo > 1:
        mid = (lo + hi) // 2
        verdict, _ = test_h(points, grid(mid), z, beta0, query_eta, rng, epsilon, kernel, core_config, trace)
        verdicts[mid] = verdict
        if verdict:
            hi = mid
        else:
            lo = mid

    yes_levels = [k for k, v in verdicts.items() if v]
    no_levels = [k for k, v in verdicts.items() if not v]
    if yes_levels and no_levels and min(yes_levels) < max(no_levels):
        trace.flag('inconsistent-answers')
        lo = min(yes_levels) - 1
    if not no_levels:
        trace.flag('all-yes')
        logger.warning("meb_alg2: every query answered yes; using the lower grid end")
    if not yes_levels:
        trace.flag('all-no')
        logger.warning("meb_alg2: every query answered no; using the upper grid end")

    i0 = lo
    h = (1.0 + e2) ** (i0 + 2) * a
    _, center = test_h(points, h, z, beta0, eta0 / 2.0, rng, epsilon, kernel, core_config, trace)
    radius = alg2_radius_factor(epsilon) * h
    trace.notes['i0'] = i0
    logger.info(f"meb_alg2: i0={i0}, h={h:.6g}, radius={radius:.6g}")
    return Ball(center, radius)


__all__ = [
    'alg1_sample_size',
    'alg1_expansion_factor',
    'alg1_lambda',
    'radius_interval_from_distance',
    'grid_length',
    'alg2_radius_factor',
    'alg2_center_error',
    'alg2_lambda',
    'center_deviation_bound',
    'oracle_sample_size',
    'radius_range',
    'meb_alg1',
    'test_h',
    'meb_alg2',
]
