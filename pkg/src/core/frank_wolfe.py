"""
Frank-Wolfe solver for the minimum enclosing ball dual.

Maximizes phi(w) = sum_i w_i G_ii - w^T G w over the unit simplex, where G is
the (kernel) Gram matrix of a small working set. The center is sum_i w_i x_i
and phi(w*) is the squared optimal radius.

Stopping certificate: with d_i the squared distance of x_i to the current
center, phi(w) = sum_i w_i d_i and gap = max_i d_i - phi(w) bounds
R*^2 - phi(w), which in turn bounds ||c(w) - c*||^2. So gap <= tol * phi
gives ||c(w) - c*|| <= sqrt(tol) * R*.
"""

from dataclasses import dataclass

import numpy as np

from ..utils import get_logger

logger = get_logger(__name__)

ABSOLUTE_GAP_FLOOR = 1e-300
SUPPORT_THRESHOLD = 1e-15


@dataclass
class DualSolution:
    """Weights and certificate of a dual MEB solve."""
    weights: np.ndarray
    value: float
    max_sq_distance: float
    gap: float
    iterations: int
    certified: bool

    @property
    def radius_lower(self) -> float:
        """sqrt(phi(w)), a lower bound on the optimal radius."""
        return float(np.sqrt(max(self.value, 0.0)))


def _state(G: np.ndarray, diag: np.ndarray, w: np.ndarray, Gw: np.ndarray):
    wGw = float(w @ Gw)
    sq = np.maximum(diag - 2.0 * Gw + wGw, 0.0)
    value = float(w @ sq)
    return sq, value


def _polish(G: np.ndarray, diag: np.ndarray, w: np.ndarray) -> np.ndarray | None:
    """
    Stationary point of phi on the affine hull of the current support.

    Solves [[2 G_SS, 1], [1^T, 0]] [w_S; mu] = [diag_S; 1]; returns the new
    weight vector or None when the solution leaves the simplex.
    """
    support = np.flatnonzero(w > SUPPORT_THRESHOLD)
    m = support.size
    if m < 2:
        return None
    system = np.zeros((m + 1, m + 1))
    system[:m, :m] = 2.0 * G[np.ix_(support, support)]
    system[:m, m] = 1.0
    system[m, :m] = 1.0
    rhs = np.concatenate([diag[support], [1.0]])
    solution = np.linalg.lstsq(system, rhs, rcond=None)[0]
    w_support = solution[:m]
    if np.any(w_support < -1e-12) or not np.all(np.isfinite(w_support)):
        return None
    polished = np.zeros_like(w)
    polished[support] = np.clip(w_support, 0.0, None)
    total = polished.sum()
    if total <= 0:
        return None
    return polished / total


def solve_meb_dual(
    G: np.ndarray,
    tol: float,
    max_iterations: int,
    weights0: np.ndarray | None = None,
    polish_interval: int = 50
) -> DualSolution:
    """
    Away-step Frank-Wolfe with exact line search on the MEB dual.

    Args:
        G: Symmetric (m, m) Gram matrix.
        tol: Relative certificate, stop when gap <= tol * phi(w).
        max_iterations: Iteration cap.
        weights0: Warm start on the simplex (shorter vectors are zero-padded).
        polish_interval: Iterations between support polish attempts
            (0 disables).

    Returns:
        DualSolution with the best weights found.
    """
    m = G.shape[0]
    diag = np.array(np.diag(G), dtype=np.float64)

    w = np.zeros(m)
    if weights0 is not None and np.sum(weights0) > 0:
        w[:len(weights0)] = np.clip(weights0, 0.0, None)
        w /= w.sum()
    else:
        w[0] = 1.0

    Gw = G @ w
    sq, value = _state(G, diag, w, Gw)
    iteration = 0

    while True:
        far = int(np.argmax(sq))
        gap = float(sq[far] - value)
        if gap <= tol * value or gap <= ABSOLUTE_GAP_FLOOR:
            return DualSolution(w, value, float(sq[far]), gap, iteration, True)
        if iteration >= max_iterations:
            logger.debug(f"Dual solve hit the iteration cap {max_iterations} (gap={gap:.3e})")
            return DualSolution(w, value, float(sq[far]), gap, iteration, False)
        iteration += 1

        support = np.flatnonzero(w > 0.0)
        near = int(support[np.argmin(sq[support])])
        toward_gain = sq[far] - value
        away_gain = value - sq[near]

        if toward_gain >= away_gain:
            curvature = sq[far]
            step = min(1.0, toward_gain / (2.0 * curvature)) if curvature > 0 else 1.0
            w *= (1.0 - step)
            w[far] += step
            Gw = (1.0 - step) * Gw + step * G[:, far]
        else:
            curvature = sq[near]
            max_step = w[near] / (1.0 - w[near]) if w[near] < 1.0 else np.inf
            step = min(max_step, away_gain / (2.0 * curvature)) if curvature > 0 else max_step
            w *= (1.0 + step)
            w[near] -= step
            if step >= max_step:
                w[near] = 0.0
            w = np.clip(w, 0.0, None)
            w /= w.sum()
            Gw = G @ w

        if polish_interval and iteration % polish_interval == 0:
            Gw = G @ w
            polished = _polish(G, diag, w)
            if polished is not None:
                polished_Gw = G @ polished
                polished_sq, polished_value = _state(G, diag, polished, polished_Gw)
                if polished_value >= value:
                    w, Gw = polished, polished_Gw
                    sq, value = polished_sq, polished_value
                    continue

        sq, value = _state(G, diag, w, Gw)
