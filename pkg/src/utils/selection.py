"""
Order-statistic helpers.

All selections run on np.partition (introselect) rather than a full sort.
Ties are resolved toward the lowest index so results are deterministic.
"""

import math

import numpy as np

CEIL_SLACK = 1e-9


def safe_ceil(x: float) -> int:
    """Ceiling that ignores floating-point noise just above an integer."""
    return int(math.ceil(x - CEIL_SLACK))


def safe_floor(x: float) -> int:
    """Floor that ignores floating-point noise just below an integer."""
    return int(math.floor(x + CEIL_SLACK))


def exclusion_count(n: int, gamma: float, delta: float) -> int:
    """
    Number of points a bi-criteria solution may leave uncovered.

    The exact outlier count n - ceil((1 - gamma) n) plus floor(delta n), so
    delta n < 1 excludes only the outliers. Clamped to n - 1.
    """
    outliers = n - safe_ceil((1.0 - gamma) * n)
    return min(outliers + safe_floor(delta * n), n - 1)


def top_t(values: np.ndarray, t: int) -> tuple[np.ndarray, float]:
    """
    Select the t largest values.

    Args:
        values: 1-D array of scores (distances or signed f values).
        t: Number of points to select, 0 <= t < len(values).

    Returns:
        (Q, l): ascending indices of the t largest entries, ties broken by
        lowest index, and the (t+1)-th largest value.

    Raises:
        ValueError: If t is out of range.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if t < 0 or t >= n:
        raise ValueError(f"t must satisfy 0 <= t < n (t={t}, n={n})")

    if t == 0:
        return np.empty(0, dtype=np.int64), float(values.max())

    part = np.partition(values, (n - t - 1, n - t))
    kth = part[n - t]
    next_value = float(part[n - t - 1])

    above = np.flatnonzero(values > kth)
    needed = t - above.shape[0]
    tied = np.flatnonzero(values == kth)[:needed]
    chosen = np.sort(np.concatenate([above, tied]))
    return chosen.astype(np.int64), next_value


def kth_largest(values: np.ndarray, k: int) -> float:
    """Return the k-th largest entry (1-based)."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    return float(np.partition(values, n - k)[n - k])


def kth_smallest(values: np.ndarray, k: int) -> float:
    """Return the k-th smallest entry (1-based)."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    return float(np.partition(values, k - 1)[k - 1])


def argmax_lowest(values: np.ndarray) -> int:
    """Index of the maximum, lowest index on ties."""
    return int(np.argmax(values))
