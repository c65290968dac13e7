"""
Point set data model.

Immutable n x d point storage with dense or CSR rows, cached squared norms,
and the planted-truth and outlier-instance containers built on top of it.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import sparse

from ..utils import get_logger, safe_ceil, RngStream

logger = get_logger(__name__)

DENSE_DIMENSION_THRESHOLD = 64


class PointSet:
    """
    Immutable collection of n points in R^d.

    Rows are stored as a read-only float64 array, or as a CSR matrix when the
    input is sparse and d exceeds DENSE_DIMENSION_THRESHOLD. Squared norms are
    computed once and reused by the sparse distance identity
    ||a - b||^2 = ||a||^2 + ||b||^2 - 2<a, b>.
    """

    def __init__(self, data: np.ndarray | sparse.spmatrix):
        if sparse.issparse(data):
            csr = sparse.csr_matrix(data, dtype=np.float64)
            csr.sum_duplicates()
            csr.sort_indices()
            n, d = csr.shape
            if d <= DENSE_DIMENSION_THRESHOLD:
                self._dense = np.ascontiguousarray(csr.toarray())
                self._csr = None
            else:
                self._dense = None
                self._csr = csr
        else:
            array = np.array(data, dtype=np.float64, copy=True)
            if array.ndim == 1:
                array = array.reshape(1, -1)
            if array.ndim != 2:
                raise ValueError(f"points must form a 2-D array, got shape {array.shape}")
            n, d = array.shape
            self._dense = np.ascontiguousarray(array)
            self._csr = None

        if n < 1 or d < 1:
            raise ValueError(f"a point set needs n >= 1 and d >= 1 (got n={n}, d={d})")

        payload = self._dense if self._dense is not None else self._csr.data
        if not np.all(np.isfinite(payload)):
            raise ValueError("point coordinates must be finite")

        self._n = int(n)
        self._d = int(d)

        if self._dense is not None:
            self._dense.setflags(write=False)
            self._sq_norms = np.einsum('ij,ij->i', self._dense, self._dense)
        else:
            self._csr.data.setflags(write=False)
            self._sq_norms = np.asarray(self._csr.multiply(self._csr).sum(axis=1)).ravel()
        self._sq_norms.setflags(write=False)

        self._digest: str | None = None

    # ----- properties -----

    @property
    def n(self) -> int:
        return self._n

    @property
    def d(self) -> int:
        return self._d

    @property
    def nnz(self) -> int:
        if self._csr is not None:
            return int(self._csr.nnz)
        return int(np.count_nonzero(self._dense))

    @property
    def is_sparse(self) -> bool:
        """True when rows are held in CSR form."""
        return self._csr is not None

    @property
    def sq_norms(self) -> np.ndarray:
        return self._sq_norms

    @property
    def dense(self) -> np.ndarray:
        """Dense view of all rows (materialised on demand for CSR storage)."""
        if self._dense is not None:
            return self._dense
        return self._csr.toarray()

    # ----- row access -----

    def _index(self, idx) -> np.ndarray | slice:
        if idx is None:
            return slice(None)
        return np.asarray(idx, dtype=np.int64)

    def count(self, idx) -> int:
        """Number of rows addressed by idx (None means all)."""
        return self._n if idx is None else int(np.asarray(idx).size)

    def rows_dense(self, idx=None) -> np.ndarray:
        """Dense (k, d) copy of the selected rows."""
        sel = self._index(idx)
        if self._dense is not None:
            return np.array(self._dense[sel])
        return self._csr[sel].toarray()

    def row_pairs(self, i: int) -> list[tuple[int, float]]:
        """Sparse (index, value) view of row i, zero entries omitted."""
        if self._csr is not None:
            start, end = self._csr.indptr[i], self._csr.indptr[i + 1]
            return [
                (int(j), float(v))
                for j, v in zip(self._csr.indices[start:end], self._csr.data[start:end])
            ]
        row = self._dense[i]
        nz = np.flatnonzero(row)
        return [(int(j), float(row[j])) for j in nz]

    def inner(self, v: np.ndarray, idx=None) -> np.ndarray:
        """Inner products <p_i, v> for the selected rows (v may be a (d, m) matrix)."""
        sel = self._index(idx)
        v = np.asarray(v, dtype=np.float64)
        if self._dense is not None:
            return self._dense[sel] @ v
        result = np.asarray(self._csr[sel] @ v)
        return result.ravel() if v.ndim == 1 else result

    def sq_distances(self, v: np.ndarray, idx=None) -> np.ndarray:
        """Squared Euclidean distances ||p_i - v||^2 for the selected rows."""
        sel = self._index(idx)
        v = np.asarray(v, dtype=np.float64)
        if self._dense is not None:
            diff = self._dense[sel] - v
            return np.einsum('ij,ij->i', diff, diff)
        values = self._sq_norms[sel] + float(v @ v) - 2.0 * self.inner(v, idx)
        return np.maximum(values, 0.0)

    def gram(self, a_idx, b_idx=None) -> np.ndarray:
        """Matrix of inner products between two row selections."""
        a_sel = self._index(a_idx)
        b_sel = a_sel if b_idx is None else self._index(b_idx)
        if self._dense is not None:
            return self._dense[a_sel] @ self._dense[b_sel].T
        return np.asarray((self._csr[a_sel] @ self._csr[b_sel].T).todense())

    def subset(self, idx) -> 'PointSet':
        """New point set holding the selected rows."""
        sel = self._index(idx)
        if self._csr is not None:
            return PointSet(self._csr[sel])
        return PointSet(self._dense[sel])

    def digest(self) -> str:
        """SHA-256 over the shape and the float64 payload."""
        if self._digest is None:
            hasher = hashlib.sha256()
            hasher.update(np.asarray([self._n, self._d], dtype=np.int64).tobytes())
            if self._dense is not None:
                hasher.update(b'dense')
                hasher.update(self._dense.tobytes())
            else:
                hasher.update(b'csr')
                hasher.update(self._csr.indptr.astype(np.int64).tobytes())
                hasher.update(self._csr.indices.astype(np.int64).tobytes())
                hasher.update(self._csr.data.tobytes())
            self._digest = hasher.hexdigest()
        return self._digest

    def to_csr(self) -> sparse.csr_matrix:
        """CSR view of all rows."""
        return self._csr if self._csr is not None else sparse.csr_matrix(self._dense)

    def __len__(self) -> int:
        return self._n

    def __repr__(self) -> str:
        storage = 'csr' if self.is_sparse else 'dense'
        return f"PointSet(n={self._n}, d={self._d}, storage={storage})"


def stack_point_sets(first: PointSet, second: PointSet) -> PointSet:
    """Rows of `first` followed by rows of `second`."""
    if first.d != second.d:
        raise ValueError(f"cannot stack point sets of dimension {first.d} and {second.d}")
    if first.is_sparse or second.is_sparse:
        return PointSet(sparse.vstack([
            first.to_csr(),
            second.to_csr(),
        ]).tocsr())
    return PointSet(np.vstack([first.dense, second.dense]))


def uniform_sample(points: PointSet, m: int, rng: RngStream) -> np.ndarray:
    """
    Draw m indices i.i.d. uniform over [0, n), with replacement.

    Args:
        points: Point set to sample from.
        m: Sample size (>= 1).
        rng: Stream the draw is taken from.

    Returns:
        int64 array of indices.

    Raises:
        ValueError: If m < 1.
    """
    if m < 1:
        raise ValueError(f"sample size m must be >= 1, got {m}")
    return rng.integers(points.n, int(m))


@dataclass
class PlantedTruth:
    """Ground truth recorded by the instance generator."""
    inlier_indices: np.ndarray
    optimum_size: float
    optimum_center: np.ndarray | None = None
    family: str = ''
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.inlier_indices = np.sort(np.asarray(self.inlier_indices, dtype=np.int64))
        if self.optimum_size < 0:
            raise ValueError(f"optimum_size must be non-negative, got {self.optimum_size}")
        if self.optimum_center is not None:
            self.optimum_center = np.asarray(self.optimum_center, dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            'inlier_indices': self.inlier_indices.tolist(),
            'optimum_size': float(self.optimum_size),
            'optimum_center': None if self.optimum_center is None else self.optimum_center.tolist(),
            'family': self.family,
            'extra': self.extra,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'PlantedTruth':
        center = data.get('optimum_center')
        return cls(
            inlier_indices=np.asarray(data.get('inlier_indices', []), dtype=np.int64),
            optimum_size=float(data['optimum_size']),
            optimum_center=None if center is None else np.asarray(center, dtype=np.float64),
            family=data.get('family', ''),
            extra=dict(data.get('extra', {})),
        )


@dataclass
class OutlierInstance:
    """A point set with an outlier fraction and optional planted truth."""
    points: PointSet
    gamma: float = 0.0
    truth: PlantedTruth | None = None

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.inlier_count < 1:
            raise ValueError("instance must keep at least one inlier")

    @property
    def n(self) -> int:
        return self.points.n

    @property
    def inlier_count(self) -> int:
        """Number of points the optimum must cover, ceil((1 - gamma) n)."""
        return safe_ceil((1.0 - self.gamma) * self.points.n)

    @property
    def outlier_count(self) -> int:
        return self.points.n - self.inlier_count
