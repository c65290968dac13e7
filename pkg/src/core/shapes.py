"""
Shape families for the generalized enclosing-shape problems.

A family fixes what a center is, the distance f(center, p) that ranks
points (larger means "more outside") and the size function. For every
family, a point p lies in x(center, r) exactly when size_from_f(f) <= r, so
the size at which a shape first touches p is size_from_f(f(center, p)).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..models import PointSet, Center, RunTrace
from .kernels import Kernel, LINEAR, center_distances

BOUNDARY_SLACK = 1e-9


class ShapeFamily(ABC):
    """Stateless description of a shape family."""

    name: str = ''

    @abstractmethod
    def f_values(self, points: PointSet, center, idx=None, trace: RunTrace | None = None) -> np.ndarray:
        """Distance f(center, p) for the selected rows."""

    def size_from_f(self, f: np.ndarray | float) -> np.ndarray | float:
        """Smallest size whose shape contains a point with distance f."""
        return f

    def touch_size(self, points: PointSet, center, idx=None) -> np.ndarray:
        return self.size_from_f(self.f_values(points, center, idx))

    def contains(self, points: PointSet, center, size: float, idx=None) -> np.ndarray:
        """Membership mask of the selected rows in x(center, size)."""
        return self.touch_size(points, center, idx) <= size + BOUNDARY_SLACK


class BallFamily(ShapeFamily):
    """Balls; f is the (feature-space) distance to the center."""

    name = 'ball'

    def __init__(self, kernel: Kernel = LINEAR):
        self.kernel = kernel

    def f_values(self, points, center: Center, idx=None, trace=None):
        return center_distances(points, center, self.kernel, idx, trace)


class KBallFamily(ShapeFamily):
    """Unions of balls with a common radius; f is the distance to the nearest center."""

    name = 'k-balls'

    def __init__(self, kernel: Kernel = LINEAR):
        self.kernel = kernel

    def f_values(self, points, centers: tuple[Center, ...], idx=None, trace=None):
        if trace is not None:
            trace.touch(points.count(idx), full=idx is None)
        result = None
        for center in centers:
            dist = center_distances(points, center, self.kernel, idx)
            result = dist if result is None else np.minimum(result, dist)
        return result


@dataclass(frozen=True)
class LineCenter:
    """Line anchor + t * direction with a unit direction."""
    anchor: np.ndarray
    direction: np.ndarray

    @classmethod
    def through(cls, a: np.ndarray, b: np.ndarray) -> 'LineCenter':
        """Line through two points (any unit direction if they coincide)."""
        a = np.asarray(a, dtype=np.float64)
        direction = np.asarray(b, dtype=np.float64) - a
        norm = np.linalg.norm(direction)
        if norm == 0.0:
            direction = np.zeros_like(a)
            direction[0] = 1.0
        else:
            direction = direction / norm
        return cls(a, direction)


class SlabFamily(ShapeFamily):
    """Slabs around a line; f is the perpendicular distance to the line."""

    name = 'slab'

    def f_values(self, points, center: LineCenter, idx=None, trace=None):
        if trace is not None:
            trace.touch(points.count(idx), full=idx is None)
        diff = points.rows_dense(idx) - center.anchor
        along = diff @ center.direction
        sq = np.einsum('ij,ij->i', diff, diff) - along ** 2
        return np.sqrt(np.maximum(sq, 0.0))


class HalfSpaceFamily(ShapeFamily):
    """
    Half-spaces {p : <p, u> >= 1 / size} not containing the origin.

    The center is a direction (a unit vector, or any object exposing
    project(points, idx) -> <p, u>). f = -sign * <p, u>; sign = -1 ranks the
    opposite side, as needed for the second class of a two-class margin.
    """

    name = 'half-space'

    def __init__(self, sign: float = 1.0):
        self.sign = sign

    def f_values(self, points, center, idx=None, trace=None):
        if trace is not None:
            trace.touch(points.count(idx), full=idx is None)
        if hasattr(center, 'project'):
            projections = center.project(points, idx)
        else:
            projections = points.inner(center, idx)
        return -self.sign * projections

    def size_from_f(self, f):
        f = np.asarray(f, dtype=np.float64)
        with np.errstate(divide='ignore'):
            sizes = np.where(-f > 0.0, 1.0 / np.where(-f > 0.0, -f, 1.0), np.inf)
        return float(sizes) if sizes.ndim == 0 else sizes


FAMILIES: dict[str, type[ShapeFamily]] = {
    'ball': BallFamily,
    'k-balls': KBallFamily,
    'slab': SlabFamily,
    'half-space': HalfSpaceFamily,
}
