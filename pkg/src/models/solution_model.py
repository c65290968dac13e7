"""
Solution data models.

Centers, balls and the other shapes returned by the solvers, plus the small
result records shared between modules. All types serialize to plain dicts
for the JSON reports.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .point_set import PointSet

WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Center:
    """
    A shape center: either an explicit vector in R^d or a convex
    combination of support points of a PointSet.

    Use Center.explicit() or Center.combination() to build one.
    """
    vector: np.ndarray | None = None
    support: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if (self.vector is None) == (self.support is None):
            raise ValueError("a center is either explicit or a combination")
        if self.vector is not None:
            vector = np.array(self.vector, dtype=np.float64).ravel()
            vector.setflags(write=False)
            object.__setattr__(self, 'vector', vector)
            return

        support = np.asarray(self.support, dtype=np.int64).ravel()
        weights = np.asarray(self.weights, dtype=np.float64).ravel()
        if support.size == 0 or support.size != weights.size:
            raise ValueError("combination needs matching non-empty support and weights")
        if np.any(support < 0):
            raise ValueError("support indices must be non-negative")
        if np.any(weights < -WEIGHT_TOLERANCE):
            raise ValueError("combination weights must be non-negative")

        # Merge repeated support indices and drop zero weights
        unique, inverse = np.unique(support, return_inverse=True)
        merged = np.zeros(unique.size, dtype=np.float64)
        np.add.at(merged, inverse, np.clip(weights, 0.0, None))
        total = merged.sum()
        if total <= 0.0:
            raise ValueError("combination weights must not all be zero")
        keep = merged > 0.0
        unique, merged = unique[keep], merged[keep] / total
        unique.setflags(write=False)
        merged.setflags(write=False)
        object.__setattr__(self, 'support', unique)
        object.__setattr__(self, 'weights', merged)

    @classmethod
    def explicit(cls, vector) -> 'Center':
        return cls(vector=vector)

    @classmethod
    def combination(cls, support, weights) -> 'Center':
        return cls(support=support, weights=weights)

    @classmethod
    def point(cls, index: int) -> 'Center':
        """Combination center sitting on a single input point."""
        return cls(support=[index], weights=[1.0])

    @property
    def is_explicit(self) -> bool:
        return self.vector is not None

    def validate_for(self, points: PointSet) -> None:
        """Raise ValueError if the center does not fit the point set."""
        if self.is_explicit:
            if self.vector.size != points.d:
                raise ValueError(f"center has dimension {self.vector.size}, points have {points.d}")
        elif self.support.max() >= points.n:
            raise ValueError(f"support index {int(self.support.max())} out of range for n={points.n}")

    def to_vector(self, points: PointSet) -> np.ndarray:
        """Explicit coordinates (linear feature space)."""
        if self.is_explicit:
            return np.array(self.vector)
        return self.weights @ points.rows_dense(self.support)

    def to_dict(self) -> dict:
        if self.is_explicit:
            return {'kind': 'explicit', 'vector': self.vector.tolist()}
        return {
            'kind': 'combination',
            'support': self.support.tolist(),
            'weights': self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Center':
        if data['kind'] == 'explicit':
            return cls.explicit(data['vector'])
        return cls.combination(data['support'], data['weights'])

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode('utf-8')
        return hashlib.sha256(payload).hexdigest()[:16]


@dataclass(frozen=True)
class Ball:
    """Ball B(center, radius)."""
    center: Center
    radius: float

    def __post_init__(self):
        if not self.radius >= 0.0:
            raise ValueError(f"radius must be non-negative, got {self.radius}")

    def to_dict(self) -> dict:
        return {'shape': 'ball', 'center': self.center.to_dict(), 'radius': float(self.radius)}


@dataclass
class CoreSetState:
    """Working state of the greedy core-set construction."""
    T: list[int]
    center: Center
    iteration: int
    epsilon: float
    s: float
    xi: float
    size_cap: int = 0

    def __post_init__(self):
        if not 0.0 < self.xi < self.epsilon / (1.0 + self.epsilon) + 1e-15:
            raise ValueError(f"xi must lie in (0, eps/(1+eps)), got {self.xi}")


@dataclass(frozen=True)
class RadiusInterval:
    """Interval [a, b] known to contain the optimal radius (w.h.p.)."""
    a: float
    b: float
    degenerate: bool = False

    def __post_init__(self):
        if self.a < 0 or self.b < self.a:
            raise ValueError(f"invalid radius interval [{self.a}, {self.b}]")
        if not self.degenerate and self.a <= 0:
            raise ValueError("a non-degenerate interval needs a > 0")

    def contains(self, value: float) -> bool:
        return self.a <= value <= self.b


@dataclass(frozen=True)
class KBallUnion:
    """Union of up to k balls sharing one radius."""
    centers: tuple[Center, ...]
    radius: float

    def __post_init__(self):
        if len(self.centers) < 1:
            raise ValueError("a k-ball union needs at least one center")

    def to_dict(self) -> dict:
        return {
            'shape': 'k-balls',
            'centers': [c.to_dict() for c in self.centers],
            'radius': float(self.radius),
        }


@dataclass(frozen=True)
class Slab:
    """All points within `width` of the line anchor + t * direction."""
    anchor: np.ndarray
    direction: np.ndarray
    width: float

    def __post_init__(self):
        norm = float(np.linalg.norm(self.direction))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"slab direction must be a unit vector (norm {norm})")

    def to_dict(self) -> dict:
        return {
            'shape': 'slab',
            'anchor': np.asarray(self.anchor).tolist(),
            'direction': np.asarray(self.direction).tolist(),
            'width': float(self.width),
        }


@dataclass(frozen=True)
class HalfSpaceMargin:
    """
    Half-space {p : <p, u> >= margin} with unit normal u.

    For kernel runs u is only known implicitly as v / ||v|| with v a convex
    combination of input points; `normal` is then None and `combination`
    holds v.
    """
    margin: float
    v_norm: float
    normal: np.ndarray | None = None
    combination: Center | None = None

    @property
    def size(self) -> float:
        """Shape size 1 / margin (infinite when the margin is not positive)."""
        return 1.0 / self.margin if self.margin > 0 else float('inf')

    def to_dict(self) -> dict:
        return {
            'shape': 'half-space',
            'margin': float(self.margin),
            'size': self.size if np.isfinite(self.size) else None,
            'v_norm': float(self.v_norm),
            'normal': None if self.normal is None else np.asarray(self.normal).tolist(),
            'combination': None if self.combination is None else self.combination.to_dict(),
        }


@dataclass(frozen=True)
class TwoClassMargin:
    """
    Two parallel hyperplanes <p, u> = upper (first class side) and
    <p, u> = lower (second class side); width = upper - lower.
    """
    upper: float
    lower: float
    v_norm: float
    normal: np.ndarray | None = None
    coefficients: dict | None = None

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            'shape': 'two-class-margin',
            'upper': float(self.upper),
            'lower': float(self.lower),
            'width': float(self.width),
            'v_norm': float(self.v_norm),
            'normal': None if self.normal is None else np.asarray(self.normal).tolist(),
            'coefficients': self.coefficients,
        }


@dataclass
class Candidate:
    """A center produced by one round of one repetition."""
    center: object
    size_estimate: float
    round: int
    repetition: int

    def __post_init__(self):
        if not self.size_estimate >= 0.0:
            raise ValueError(f"size estimate must be non-negative, got {self.size_estimate}")


@dataclass(frozen=True)
class StabilityBound:
    """One-sided bound on the instance's stability level alpha-hat."""
    kind: Literal['upper', 'lower']
    value: float
    strict: bool = True

    def __str__(self) -> str:
        if self.kind == 'upper':
            op = '<' if self.strict else '<='
        else:
            op = '>' if self.strict else '>='
        return f"α̂ {op} {self.value:.6g}"

    def to_dict(self) -> dict:
        return {'kind': self.kind, 'value': self.value, 'strict': self.strict, 'text': str(self)}


@dataclass
class HybridResult:
    """Outcome of a hybrid solver: a ball and which guarantee it carries."""
    ball: Ball
    label: Literal['radius-approx', 'covering-approx']
    ratio: float
    threshold: float
    stability_bound: StabilityBound | None = None
    epsilon: float = 0.0
    variant: Literal['meb', 'outliers'] = 'meb'
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ratio < 0:
            raise ValueError("ratio must be non-negative")
        expected = 'radius-approx' if self.ratio <= self.threshold else 'covering-approx'
        if self.label != expected:
            raise ValueError(f"label {self.label} inconsistent with ratio {self.ratio}")

    def to_dict(self) -> dict:
        return {
            'ball': self.ball.to_dict(),
            'label': self.label,
            'ratio': self.ratio,
            'threshold': self.threshold,
            'stability_bound': None if self.stability_bound is None else self.stability_bound.to_dict(),
            'variant': self.variant,
            **self.details,
        }


@dataclass
class OracleResult:
    """Reference optimum with the tolerance its method certifies."""
    optimum_size: float
    optimum_center: Center | None
    method: str
    certified_tolerance: float
    subproblems: int = 0

    def __post_init__(self):
        if self.certified_tolerance < 0:
            raise ValueError("certified_tolerance must be non-negative")


@dataclass
class GilbertResult:
    """Approximate minimum-norm point of a convex hull."""
    center: Center
    distance: float
    iterations: int
    norm_history: np.ndarray
    flags: list[str] = field(default_factory=list)
    estimated_e: float | None = None
