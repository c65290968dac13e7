"""
Kernel evaluation and point-to-center distances.

Centers are explicit vectors or convex combinations of input points. With
the linear kernel a combination is materialised once and distances are plain
Euclidean ones; with the rbf kernel distances follow the kernel expansion
||phi(p) - sum_i w_i phi(t_i)||^2 = k(p,p) - 2 w^T k(T,p) + w^T K(T,T) w.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..models import PointSet, Center, RunTrace


@dataclass(frozen=True)
class Kernel:
    """Feature-space inner product."""
    kind: Literal['linear', 'rbf'] = 'linear'
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.kind not in ('linear', 'rbf'):
            raise ValueError(f"unknown kernel kind: {self.kind}")
        if self.kind == 'rbf' and not self.bandwidth > 0:
            raise ValueError(f"rbf bandwidth must be positive, got {self.bandwidth}")

    @property
    def is_linear(self) -> bool:
        return self.kind == 'linear'

    def cross(self, points: PointSet, a_idx, b_idx=None) -> np.ndarray:
        """Kernel matrix between two row selections of one point set."""
        gram = points.gram(a_idx, b_idx)
        if self.is_linear:
            return gram
        a_norms = points.sq_norms if a_idx is None else points.sq_norms[np.asarray(a_idx)]
        b_sel = a_idx if b_idx is None else b_idx
        b_norms = points.sq_norms if b_sel is None else points.sq_norms[np.asarray(b_sel)]
        sq = np.maximum(a_norms[:, None] + b_norms[None, :] - 2.0 * gram, 0.0)
        return np.exp(-sq / (2.0 * self.bandwidth ** 2))

    def between(self, first: PointSet, first_idx, second: PointSet, second_idx) -> np.ndarray:
        """Kernel matrix between rows of two point sets of the same dimension."""
        rows = second.rows_dense(second_idx)
        gram = first.inner(rows.T, first_idx)
        if self.is_linear:
            return gram
        first_norms = first.sq_norms if first_idx is None else first.sq_norms[np.asarray(first_idx)]
        second_norms = np.einsum('ij,ij->i', rows, rows)
        sq = np.maximum(first_norms[:, None] + second_norms[None, :] - 2.0 * gram, 0.0)
        return np.exp(-sq / (2.0 * self.bandwidth ** 2))

    def diagonal(self, points: PointSet, idx=None) -> np.ndarray:
        """k(p, p) for the selected rows."""
        if self.is_linear:
            return np.array(points.sq_norms if idx is None else points.sq_norms[np.asarray(idx)])
        return np.ones(points.count(idx), dtype=np.float64)

    def to_dict(self) -> dict:
        return {'kind': self.kind, 'bandwidth': self.bandwidth if self.kind == 'rbf' else None}


LINEAR = Kernel('linear')


def _kernel_formula(points: PointSet, center: Center, kernel: Kernel, idx) -> np.ndarray:
    support, weights = center.support, center.weights
    cross = kernel.cross(points, idx, support)
    center_norm = float(weights @ kernel.cross(points, support, support) @ weights)
    values = kernel.diagonal(points, idx) - 2.0 * (cross @ weights) + center_norm
    return np.maximum(values, 0.0)


def center_sq_distances(
    points: PointSet,
    center: Center,
    kernel: Kernel = LINEAR,
    idx=None,
    trace: RunTrace | None = None,
    kernel_formula: bool = False
) -> np.ndarray:
    """
    Squared feature-space distances from a center to selected points.

    Args:
        points: Point set.
        center: Explicit or combination center.
        kernel: Kernel defining the feature space.
        idx: Row selection; None scans all points (a full pass).
        trace: Work counter to charge.
        kernel_formula: Force the kernel expansion for linear combinations.

    Raises:
        ValueError: For an explicit center under a non-linear kernel.
    """
    if trace is not None:
        trace.touch(points.count(idx), full=idx is None)

    if center.is_explicit:
        if not kernel.is_linear:
            raise ValueError("explicit centers cannot be evaluated under a non-linear kernel")
        return points.sq_distances(center.vector, idx)

    if kernel.is_linear and not kernel_formula:
        return points.sq_distances(center.to_vector(points), idx)
    return _kernel_formula(points, center, kernel, idx)


def center_distances(
    points: PointSet,
    center: Center,
    kernel: Kernel = LINEAR,
    idx=None,
    trace: RunTrace | None = None,
    kernel_formula: bool = False
) -> np.ndarray:
    """Feature-space distances; see center_sq_distances()."""
    return np.sqrt(center_sq_distances(points, center, kernel, idx, trace, kernel_formula))
