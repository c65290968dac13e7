"""
Core-set construction of the minimum enclosing ball.

The greedy loop keeps a small working set T, computes an approximate center
of MEB(T) each round and adds the farthest point of the input. Approximate
centers come from the certified Frank-Wolfe dual solver, so the distance of
each center to the exact center of MEB(T) is at most xi * Rad(T).
"""

import numpy as np

from ..models import (
    PointSet,
    Center,
    Ball,
    CoreSetState,
    CoreSetConfig,
    RunTrace,
)
from ..utils import get_logger, safe_ceil
from .frank_wolfe import solve_meb_dual, DualSolution
from .kernels import Kernel, LINEAR, center_distances, center_sq_distances

logger = get_logger(__name__)


def coreset_size(epsilon: float, s: float) -> int:
    """Round bound z = ceil(2 / ((1 - s) epsilon))."""
    return safe_ceil(2.0 / ((1.0 - s) * epsilon))


def coreset_size_bound(epsilon: float, s: float) -> int:
    """Largest |T| the construction may reach: z plus the initial point."""
    return coreset_size(epsilon, s) + 1


def approx_center_dual(
    points: PointSet,
    T,
    xi: float,
    kernel: Kernel = LINEAR,
    config: CoreSetConfig | None = None,
    warm_weights: np.ndarray | None = None
) -> tuple[np.ndarray, DualSolution]:
    """
    Certified dual solve over the distinct points of T.

    Returns:
        (support, solution): the distinct indices of T in first-seen order
        and the dual solution over them.
    """
    config = config or CoreSetConfig()
    T = np.asarray(T, dtype=np.int64)
    if T.size == 0:
        raise ValueError("approx_center needs a non-empty working set T")
    if not 0.0 < xi < 1.0:
        raise ValueError(f"xi must lie in (0, 1), got {xi}")

    _, first = np.unique(T, return_index=True)
    support = T[np.sort(first)]

    G = kernel.cross(points, support, support)
    cap = min(safe_ceil(config.fw_iteration_constant / xi ** 2), config.fw_max_iterations)
    solution = solve_meb_dual(
        G,
        tol=xi ** 2,
        max_iterations=cap,
        weights0=warm_weights,
        polish_interval=config.polish_interval,
    )
    if not solution.certified:
        logger.warning(
            f"Approximate center not certified after {solution.iterations} iterations "
            f"(|T|={support.size}, xi={xi:.3g})"
        )
    return support, solution


def approx_center(
    points: PointSet,
    T,
    xi: float,
    kernel: Kernel = LINEAR,
    config: CoreSetConfig | None = None
) -> Center:
    """
    Combination center o over T with ||o - c(MEB(T))|| <= xi * Rad(T).

    Args:
        points: Point set.
        T: Non-empty index list.
        xi: Relative center accuracy in (0, 1).
        kernel: Feature space.
        config: Iteration constants.

    Raises:
        ValueError: If T is empty or xi is out of range.
    """
    support, solution = approx_center_dual(points, T, xi, kernel, config)
    return Center.combination(support, solution.weights)


def farthest_point(
    points: PointSet,
    center: Center,
    kernel: Kernel = LINEAR,
    idx=None,
    trace: RunTrace | None = None
) -> tuple[int, float]:
    """
    Point farthest from the center, lowest index on ties.

    Args:
        points: Point set.
        center: Current center.
        kernel: Feature space.
        idx: Restrict the scan to these rows (None: all points).
        trace: Work counter.

    Returns:
        (index into points, distance).
    """
    sq = center_sq_distances(points, center, kernel, idx, trace)
    best = sq.max()
    hits = np.flatnonzero(sq == best)
    if idx is None:
        index = int(hits[0])
    else:
        index = int(np.asarray(idx, dtype=np.int64)[hits].min())
    return index, float(np.sqrt(best))


def badoiu_clarkson(
    points: PointSet,
    epsilon: float,
    s: float = 1.0 / 3.0,
    kernel: Kernel = LINEAR,
    idx=None,
    config: CoreSetConfig | None = None,
    trace: RunTrace | None = None
) -> tuple[Ball, CoreSetState]:
    """
    (1 + epsilon)-radius approximate MEB by the greedy core-set loop.

    Each round computes an approximate center with xi = s * eps / (1 + eps)
    and scans for the farthest point q. The loop stops once ||q - o|| is at
    most (1 + eps) times the certified lower bound sqrt(phi) on Rad(T), or
    when |T| reaches the size bound. The returned ball is the round whose
    full-scan radius was smallest, so it always covers the scanned points.

    Args:
        points: Point set.
        epsilon: Radius error in (0, 1).
        s: Center accuracy split in (0, 1).
        kernel: Feature space.
        idx: Run on a subset of rows (None: all points).
        config: Core-set constants.
        trace: Work counter.

    Returns:
        (ball, state) with state.T the final working set.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")

    config = config or CoreSetConfig()
    pool = None if idx is None else np.asarray(idx, dtype=np.int64)
    xi = s * epsilon / (1.0 + epsilon)
    size_cap = coreset_size_bound(epsilon, s)

    T = [int(pool[0]) if pool is not None else 0]
    weights = None
    best: tuple[float, Center] | None = None
    rounds = 0

    while True:
        rounds += 1
        support, solution = approx_center_dual(points, T, xi, kernel, config, weights)
        center = Center.combination(support, solution.weights)
        far_index, far_dist = farthest_point(points, center, kernel, pool, trace)

        if best is None or far_dist < best[0]:
            best = (far_dist, center)

        if far_dist <= (1.0 + epsilon) * solution.radius_lower:
            break
        if len(T) >= size_cap:
            logger.debug(f"Core-set reached its size bound {size_cap}")
            if trace is not None:
                trace.flag('coreset-size-cap')
            break
        if far_index in T:
            break

        T.append(far_index)
        weights = solution.weights

    radius, center = best
    state = CoreSetState(
        T=T,
        center=center,
        iteration=rounds,
        epsilon=epsilon,
        s=s,
        xi=xi,
        size_cap=size_cap,
    )
    logger.debug(f"Core-set loop finished: rounds={rounds}, |T|={len(T)}, radius={radius:.6g}")
    return Ball(center, radius), state


def eval_distance(
    points: PointSet,
    center: Center,
    p_index: int,
    kernel: Kernel = LINEAR
) -> float:
    """
    Feature-space distance of one point to a center.

    Raises:
        ValueError: On an invalid index or an explicit center under rbf.
    """
    if not 0 <= p_index < points.n:
        raise ValueError(f"point index {p_index} out of range for n={points.n}")
    center.validate_for(points)
    return float(center_distances(points, center, kernel, [p_index])[0])
