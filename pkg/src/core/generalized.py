"""
Sampling primitives for enclosing shapes with outliers.

These work for any ShapeFamily: ranking by f, the two-level uniform-adaptive
sample that proposes the next core-set point, and the sandwich estimate of
the rank size from a uniform sample. The ball versions in meb_outliers are
thin wrappers.
"""

import math

import numpy as np

from ..models import PointSet, RunTrace, uniform_sample
from ..utils import get_logger, safe_ceil, top_t, kth_largest, RngStream
from .shapes import ShapeFamily

logger = get_logger(__name__)


def adaptive_sample_size(delta: float, eta1: float, c2: float = 1.0) -> int:
    """n' = ceil((c2 / delta) ln(1 / eta1))."""
    return safe_ceil((c2 / delta) * math.log(1.0 / eta1))


def adaptive_pool_size(gamma: float, delta: float, n_prime: int) -> int:
    """t' = ceil(1.5 (delta + gamma) n')."""
    return safe_ceil(1.5 * (delta + gamma) * n_prime)


def sandwich_sample_size(gamma: float, delta: float, eta2: float, c3: float = 1.0) -> int:
    """n'' = ceil((c3 gamma / delta^2) ln(1 / eta2))."""
    return safe_ceil((c3 * gamma / delta ** 2) * math.log(1.0 / eta2))


def sandwich_rank(gamma: float, delta: float, n_double_prime: int) -> int:
    """Rank ceil((1 + delta/gamma)^2 gamma n'') + 1 of the estimating sample point."""
    return safe_ceil((1.0 + delta / gamma) ** 2 * gamma * n_double_prime) + 1


def generalized_rank(
    points: PointSet,
    family: ShapeFamily,
    center,
    t: int,
    idx=None,
    trace: RunTrace | None = None,
    debug: bool = False
) -> tuple[np.ndarray, float]:
    """
    The t points of largest f and the size touching the next one.

    Args:
        points: Point set.
        family: Shape family.
        center: Family-specific center.
        t: Number of points excluded, 0 <= t < (number of rows).
        idx: Restrict to these rows (None: a full pass).
        trace: Work counter.
        debug: Check that P minus x(center, l) equals Q.

    Returns:
        (Q, l): indices of the t largest-f points (ties to lowest index) and
        l = touch size of the (t+1)-th ranked point.

    Raises:
        ValueError: If t is out of range.
    """
    f = family.f_values(points, center, idx, trace)
    local, f_next = top_t(f, t)
    size = float(family.size_from_f(f_next))
    Q = local if idx is None else np.asarray(idx, dtype=np.int64)[local]

    if debug:
        _check_rank_witness(family, f, local, f_next, size)
    return Q, size


def _check_rank_witness(family: ShapeFamily, f, local, f_next, size) -> None:
    if not np.isfinite(size):
        return
    if local.size and np.min(f[local]) <= f_next:
        return  # tie at the boundary
    outside = np.flatnonzero(np.asarray(family.size_from_f(f)) > size)
    if not np.array_equal(np.sort(outside), np.sort(local)):
        raise AssertionError(
            f"rank witness failed for {family.name}: {outside.size} points outside, "
            f"{local.size} ranked"
        )


def generalized_uniform_adaptive(
    points: PointSet,
    family: ShapeFamily,
    center,
    gamma: float,
    delta: float,
    eta1: float,
    rng: RngStream,
    c2: float = 1.0,
    trace: RunTrace | None = None
) -> int:
    """
    Two-level sample: n' uniform points, then one uniform pick among their
    ceil(1.5 (delta + gamma) n') largest-f members.

    Returns:
        Index of the picked point.

    Raises:
        ValueError: If the pool Q' would be empty.
    """
    n_prime = adaptive_sample_size(delta, eta1, c2)
    pool_size = adaptive_pool_size(gamma, delta, n_prime)
    if n_prime < 1 or pool_size < 1:
        raise ValueError(f"empty adaptive pool (n'={n_prime}, t'={pool_size})")
    pool_size = min(pool_size, n_prime)

    sample = uniform_sample(points, n_prime, rng)
    if trace is not None:
        trace.add_sample('n_prime', n_prime)
        trace.add_sample('t_prime', pool_size)

    if pool_size == n_prime:
        family.f_values(points, center, sample, trace)
        pool = np.arange(n_prime)
    else:
        f = family.f_values(points, center, sample, trace)
        pool, _ = top_t(f, pool_size)
    pick = rng.index(pool.size)
    return int(sample[pool[pick]])


def generalized_sandwich_value(
    points: PointSet,
    family: ShapeFamily,
    center,
    gamma: float,
    delta: float,
    eta2: float,
    rng: RngStream,
    c3: float = 1.0,
    trace: RunTrace | None = None
) -> float:
    """
    Sample-rank estimate as an f value (signed; used where sizes are not finite).

    Raises:
        ValueError: If delta >= gamma / 3.
    """
    if not delta < gamma / 3.0:
        raise ValueError(f"the size estimate needs delta < gamma / 3 (delta={delta}, gamma={gamma})")

    n_double_prime = sandwich_sample_size(gamma, delta, eta2, c3)
    rank = min(sandwich_rank(gamma, delta, n_double_prime), n_double_prime)
    sample = uniform_sample(points, n_double_prime, rng)
    if trace is not None:
        trace.add_sample('n_double_prime', n_double_prime)
        trace.add_sample('sandwich_rank', rank)

    f = family.f_values(points, center, sample, trace)
    return kth_largest(f, rank)


def generalized_sandwich(
    points: PointSet,
    family: ShapeFamily,
    center,
    gamma: float,
    delta: float,
    eta2: float,
    rng: RngStream,
    c3: float = 1.0,
    trace: RunTrace | None = None
) -> float:
    """
    Sandwich estimate of the rank size.

    Samples n'' points and returns the touch size of the
    (ceil((1 + delta/gamma)^2 gamma n'') + 1)-th largest-f one.

    Raises:
        ValueError: If delta >= gamma / 3.
    """
    value = generalized_sandwich_value(points, family, center, gamma, delta, eta2, rng, c3, trace)
    return float(family.size_from_f(value))
