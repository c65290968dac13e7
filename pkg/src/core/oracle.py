"""
Reference solvers for tests and verification.

exact_meb is combinatorial for d <= 3 and a certified-gap dual solver above
that; the outlier and polytope-distance oracles enumerate subsets and only
run at tiny scale.
"""

import itertools

import numpy as np
from scipy.special import comb

from ..models import PointSet, Center, OutlierInstance, OracleResult, SolverConfig
from ..utils import get_logger, RefusalError, RngStream
from .frank_wolfe import solve_meb_dual

logger = get_logger(__name__)

COMBINATORIAL_MAX_DIMENSION = 3
COMBINATORIAL_TOLERANCE = 1e-12
POLYTOPE_TOLERANCE = 1e-10


def circumsphere(boundary: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest sphere through all boundary points, centered in their affine hull."""
    base = boundary[0]
    if boundary.shape[0] == 1:
        return np.array(base), 0.0
    Q = boundary[1:] - base
    M = Q @ Q.T
    coeffs = np.linalg.lstsq(M, 0.5 * np.diag(M), rcond=None)[0]
    center = base + coeffs @ Q
    radius = float(np.max(np.linalg.norm(boundary - center, axis=1)))
    return center, radius


def _welzl(rows: np.ndarray, rng: RngStream) -> tuple[np.ndarray, list[int]]:
    n, d = rows.shape
    order = rng.generator.permutation(n)
    P = rows[order]
    slack = COMBINATORIAL_TOLERANCE * max(1.0, float(np.max(np.abs(P))))

    def solve(end: int, boundary: list[int]):
        if boundary:
            center, radius = circumsphere(P[boundary])
        else:
            center, radius = None, -1.0
        support = boundary
        if len(boundary) == d + 1:
            return center, radius, support
        for i in range(end):
            if radius < 0.0 or np.linalg.norm(P[i] - center) > radius + slack:
                center, radius, support = solve(i, boundary + [i])
        return center, radius, support

    center, _, support = solve(n, [])
    return center, [int(order[i]) for i in support]


def _dual_meb(points: PointSet, tolerance: float, config: SolverConfig) -> tuple[np.ndarray, float, float]:
    """Core-set loop around the dual solver; returns (center, radius, relative certificate)."""
    T = [0]
    weights = None
    while True:
        G = points.gram(T, T)
        solution = solve_meb_dual(
            G,
            tol=tolerance,
            max_iterations=config.core_set.fw_max_iterations,
            weights0=weights,
            polish_interval=config.core_set.polish_interval,
        )
        center = solution.weights @ points.rows_dense(T)
        sq = points.sq_distances(center)
        far = int(np.argmax(sq))
        lower = solution.radius_lower
        radius = float(np.sqrt(sq[far]))
        if radius <= (1.0 + tolerance) * lower or far in T or radius == 0.0:
            certificate = radius / lower - 1.0 if lower > 0 else 0.0
            return center, radius, max(certificate, 0.0)
        T.append(far)
        weights = np.append(solution.weights, 0.0)


def exact_meb(points: PointSet, config: SolverConfig | None = None) -> OracleResult:
    """
    Minimum enclosing ball of P.

    d <= 3: Welzl-style recursion over boundary sets of at most d + 1 points
    (tolerance 1e-12). d > 3: core-set loop over the dual solver until every
    point lies within (1 + tolerance) times the certified lower bound.
    """
    config = config or SolverConfig()
    if points.d <= COMBINATORIAL_MAX_DIMENSION:
        rows = points.rows_dense()
        center, support = _welzl(rows, RngStream(0))
        radius = float(np.sqrt(np.max(points.sq_distances(center))))
        logger.debug(f"exact_meb: welzl radius={radius:.12g}, support={support}")
        return OracleResult(
            optimum_size=radius,
            optimum_center=Center.explicit(center),
            method='welzl',
            certified_tolerance=COMBINATORIAL_TOLERANCE,
        )

    center, radius, certificate = _dual_meb(points, config.oracle.tolerance, config)
    if certificate > config.oracle.tolerance:
        logger.warning(f"exact_meb: certificate {certificate:.3e} above tolerance {config.oracle.tolerance:.1e}")
    return OracleResult(
        optimum_size=radius,
        optimum_center=Center.explicit(center),
        method='dual-gap',
        certified_tolerance=certificate,
    )


def exact_meb_outliers_tiny(inst: OutlierInstance, config: SolverConfig | None = None) -> OracleResult:
    """
    Optimal MEB with outliers by enumerating every outlier subset.

    Raises:
        RefusalError: If C(n, outlier count) exceeds the configured cap.
    """
    config = config or SolverConfig()
    points = inst.points
    n, m = points.n, inst.outlier_count
    subsets = int(comb(n, m, exact=True))
    if subsets > config.oracle.max_outlier_subsets:
        raise RefusalError(
            f"C({n}, {m}) = {subsets} outlier subsets exceed the cap of {config.oracle.max_outlier_subsets}",
            reason='budget',
        )

    best: OracleResult | None = None
    everyone = np.arange(n)
    for removed in itertools.combinations(range(n), m):
        keep = np.delete(everyone, list(removed))
        result = exact_meb(points.subset(keep), config)
        if best is None or result.optimum_size < best.optimum_size:
            best = result
    logger.debug(f"exact_meb_outliers_tiny: {subsets} subsets, optimum={best.optimum_size:.12g}")
    return OracleResult(
        optimum_size=best.optimum_size,
        optimum_center=best.optimum_center,
        method='enumeration',
        certified_tolerance=best.certified_tolerance,
        subproblems=subsets,
    )


def exact_polytope_distance_tiny(points: PointSet, config: SolverConfig | None = None) -> OracleResult:
    """
    Distance from the origin to conv(P) by active-set enumeration.

    For every support subset S the least-norm point of aff(S) comes from
    the KKT system [[G_SS, 1], [1^T, 0]]; solutions with non-negative
    weights are feasible and the smallest norm among them is optimal.

    Raises:
        ValueError: If n exceeds the configured maximum.
    """
    config = config or SolverConfig()
    n = points.n
    if n > config.oracle.max_polytope_points:
        raise ValueError(f"polytope oracle handles at most {config.oracle.max_polytope_points} points, got {n}")

    rows = points.rows_dense()
    best_norm, best_center = np.inf, None
    count = 0
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            count += 1
            S = list(subset)
            G = rows[S] @ rows[S].T
            system = np.zeros((size + 1, size + 1))
            system[:size, :size] = G
            system[:size, size] = 1.0
            system[size, :size] = 1.0
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            weights = np.linalg.lstsq(system, rhs, rcond=None)[0][:size]
            if np.any(weights < -POLYTOPE_TOLERANCE) or abs(weights.sum() - 1.0) > 1e-9:
                continue
            weights = np.clip(weights, 0.0, None)
            weights /= weights.sum()
            norm = float(np.linalg.norm(weights @ rows[S]))
            if norm < best_norm:
                best_norm, best_center = norm, Center.combination(S, weights)

    return OracleResult(
        optimum_size=best_norm,
        optimum_center=best_center,
        method='active-set',
        certified_tolerance=POLYTOPE_TOLERANCE,
        subproblems=count,
    )
