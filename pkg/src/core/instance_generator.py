"""
Synthetic instance generation with planted ground truth.

Every family returns (PointSet, gamma, PlantedTruth). Planted families put
their outliers at least `separation` times the planted optimum away from
the planted shape and shuffle rows, so inlier positions are random.
"""

import math

import numpy as np

from ..models import PointSet, PlantedTruth
from ..utils import get_logger, safe_ceil, RngStream
from .oracle import exact_meb

logger = get_logger(__name__)

# (inclusive lower, exclusive upper) bounds of the outlier placement factor
OUTLIER_SPREAD = (1.1, 2.0)

FAMILY_DEFAULTS: dict[str, dict] = {
    'uniform-ball': {'n': 1000, 'd': 10, 'radius': 1.0},
    'simplex': {'d': 3, 'edge': 1.0},
    'planted-outliers': {'n': 1000, 'd': 10, 'gamma': 0.05, 'radius': 1.0, 'separation': 10.0},
    'two-class-margin': {'n': 1000, 'd': 10, 'gamma': 0.05, 'width': 1.0, 'spread': 2.0, 'separation': 5.0},
    'one-class-margin': {'n': 1000, 'd': 10, 'gamma': 0.05, 'rho': 1.0, 'spread': 2.0, 'separation': 5.0},
    'line-with-noise': {'n': 1000, 'd': 10, 'gamma': 0.05, 'sigma': 0.05, 'length': 10.0, 'separation': 10.0},
    'k-clusters': {'n': 1000, 'd': 10, 'k': 2, 'gamma': 0.05, 'radius': 1.0, 'separation': 10.0},
    'satellite': {'n': 1000, 'd': 10, 'fraction': 0.05, 'distance': 3.0, 'radius': 1.0},
}


def _unit_vectors(rng: RngStream, count: int, d: int) -> np.ndarray:
    vectors = rng.normal((count, d))
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return vectors / norms


def _uniform_ball(rng: RngStream, count: int, d: int, radius: float) -> np.ndarray:
    """count points uniform in the d-ball of the given radius around the origin."""
    directions = _unit_vectors(rng, count, d)
    scale = radius * rng.uniform(0.0, 1.0, count) ** (1.0 / d)
    return directions * scale[:, None]


def _orthogonal_noise(rng: RngStream, count: int, direction: np.ndarray, scale: float) -> np.ndarray:
    noise = rng.normal((count, direction.size), scale)
    return noise - np.outer(noise @ direction, direction)


def _outlier_factors(rng: RngStream, count: int) -> np.ndarray:
    return rng.uniform(OUTLIER_SPREAD[0], OUTLIER_SPREAD[1], count)


def _split_counts(n: int, gamma: float) -> tuple[int, int]:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    inliers = safe_ceil((1.0 - gamma) * n)
    if inliers < 1:
        raise ValueError(f"n={n} is too small to keep an inlier at gamma={gamma}")
    return inliers, n - inliers


def _shuffled(rng: RngStream, inliers: np.ndarray, outliers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Stack and shuffle rows; returns (rows, sorted positions of the inlier rows)."""
    rows = np.vstack([inliers, outliers]) if outliers.size else np.array(inliers)
    order = rng.generator.permutation(rows.shape[0])
    position = np.empty_like(order)
    position[order] = np.arange(order.size)
    return rows[order], np.sort(position[:inliers.shape[0]])


def _check_positive(params: dict, *names: str) -> None:
    for name in names:
        if not params[name] > 0:
            raise ValueError(f"{name} must be positive, got {params[name]}")


# ----- families -----

def uniform_ball(params: dict, rng: RngStream) -> tuple[PointSet, float, PlantedTruth]:
    n, d, radius = int(params['n']), int(params['d']), float(params['radius'])
    _check_positive(params, 'n', 'd', 'radius')
    points = PointSet(_uniform_ball(rng, n, d, radius))
    oracle = exact_meb(points)
    truth = PlantedTruth(
        inlier_indices=np.arange(n),
        optimum_size=oracle.optimum_size,
        optimum_center=oracle.optimum_center.vector,
        family='uniform-ball',
        extra={'radius': radius, 'oracle_method': oracle.method},
    )
    return points, 0.0, truth


def simplex(params: dict, rng: RngStream) -> tuple[PointSet, float, PlantedTruth]:
    """Regular simplex of d + 1 points in R^d with the given edge length, centered at the origin."""
    d, edge = int(params['d']), float(params['edge'])
    _check_positive(params, 'd', 'edge')
    vertices = np.eye(d + 1) * (edge / math.sqrt(2.0))
    vertices -= vertices.mean(axis=0)
    _, _, vt = np.linalg.svd(vertices)
    rows = vertices @ vt[:d].T
    rows -= rows.mean(axis=0)
    truth = PlantedTruth(
        inlier_indices=np.arange(d + 1),
        optimum_size=edge * math.sqrt(d / (2.0 * (1.0 + d))),
        optimum_center=np.zeros(d),
        family='simplex',
        extra={'edge': edge},
    )
    return PointSet(rows), 0.0, truth


def planted_outliers(params: dict, rng: RngStream) -> tuple[PointSet, float, PlantedTruth]:
    """Uniform ball of inliers; outliers far from the inliers' MEB center."""
    n, d, gamma = int(params['n']), int(params['d']), float(params['gamma'])
    radius, separation = float(params['radius']), float(params['separation'])
    _check_positive(params, 'd', 'radius', 'separation')
    n_in, n_out = _split_counts(n, gamma)

    inliers = _uniform_ball(rng, n_in, d, radius)
    oracle = exact_meb(PointSet(inliers))
    center, opt = oracle.optimum_center.vector, oracle.optimum_size
    reach = separation * max(opt, radius * 1e-6)
    outliers = center + _unit_vectors(rng, n_out, d) * (reach * _outlier_factors(rng, n_out))[:, None]

    rows, inlier_idx = _shuffled(rng, inliers, outliers.reshape(n_out, d))
    truth = PlantedTruth(
        inlier_indices=inlier_idx,
        optimum_size=opt,
        optimum_center=center,
        family='planted-outliers',
        extra={'radius': radius, 'separation': separation, 'gamma': gamma},
    )
    return PointSet(rows), gamma, truth


def one_class_margin(params: dict, rng: RngStream) -> tuple[PointSet, float, PlantedTruth]:
    """
    Inliers in {p : <p, u> >= rho}, one of them at rho * u, so the inliers'
    distance to the origin is exactly rho; outliers behind the origin.
    """
    n, d, gamma = int(params['n']), int(params['d']), float(params['gamma'])
    rho, spread, separation = float(params['rho']), float(params['spread']), float(params['separation'])
    _check_positive(params, 'd', 'rho', 'spread', 'separation')
    n_in, n_out = _split_counts(n, gamma)
    u = _unit_vectors(rng, 1, d)[0]

    heights = rho + np.abs(rng.normal(n_in, spread))
    inliers = np.outer(heights, u) + _orthogonal_noise(rng, n_in, u, spread)
    inliers[0] = rho * u
    depth = separation * rho * _outlier_factors(rng, n_out)
    outliers = np.outer(-depth, u) + _orthogonal_noise(rng, n_out, u, spread)

    rows, inlier_idx = _shuffled(rng, inliers, outliers.reshape(n_out, d))
    truth = PlantedTruth(
        inlier_indices=inlier_idx,
        optimum_size=1.0 / rho,
        optimum_center=u,
        family='one-class-margin',
        extra={'rho': rho, 'normal': u.tolist(), 'gamma': gamma},
    )
    return PointSet(rows), gamma, truth


def two_class_margin(params: dict, rng: RngStream) -> tuple[PointSet, float, PlantedTruth]:
    """
    Two classes on either side of the hyperplane <p, u> = 0 with a planted
    gap of `width` between their inliers; each class has a gamma fraction of
    outliers pushed deep into the other side. Labels (+1 / -1) are in
    truth.extra['labels'] and gamma applies per class.
    """
    n, d, gamma = int(params['n']), int(params['d']), float(params['gamma'])
    width, spread, separation = float(params['width']), float(params['spread']), float(params['separation'])
    _check_positive(params, 'd', 'width', 'spread', 'separation')
    if n < 2:
        raise ValueError(f"two classes need n >= 2, got {n}")
    u = _unit_vectors(rng, 1, d)[0]
    half = width / 2.0

    blocks, labels, inlier_mask = [], [], []
    for sign, size in ((1.0, n // 2), (-1.0, n - n // 2)):
        n_in, n_out = _split_counts(size, gamma)
        heights = half + np.abs(rng.normal(n_in, spread))
        inliers = sign * np.outer(heights, u) + _orthogonal_noise(rng, n_in, u, spread)
        inliers[0] = sign * half * u
        depth = half + separation * width * _outlier_factors(rng, n_out)
        outliers = -sign * np.outer(depth, u) + _orthogonal_noise(rng, n_out, u, spread)
        blocks += [inliers, outliers.reshape(n_out, d)]
        labels += [int(sign)] * size
        inlier_mask += [True] * n_in + [False] * n_out

    rows = np.vstack(blocks)
    order = rng.generator.permutation(n)
    rows, labels = rows[order], np.asarray(labels)[order]
    inlier_idx = np.flatnonzero(np.asarray(inlier_mask)[order])
    truth = PlantedTruth(
        inlier_indices=inlier_idx,
        optimum_size=width,
        optimum_center=u,
        family='two-class-margin',
        extra={'labels': labels.tolist(), 'normal': u.tolist(), 'gamma': gamma, 'width': width},
    )
    return PointSet(rows), gamma, truth


def line_with_noise(params: dict, rng: RngStream) -> tuple[PointSet, float, PlantedTruth]:
    """Points along a line with Gaussian noise orthogonal to it; outliers far from the line."""
    n, d, gamma = int(params['n']), int(params['d']), float(params['gamma'])
    sigma, length, separation = float(params['sigma']), float(params['length']), float(params['separation'])
    if d < 2:
        raise ValueError(f"line instances need d >= 2, got {d}")
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    _check_positive(params, 'length', 'separation')
    n_in, n_out = _split_counts(n, gamma)

    direction = _unit_vectors(rng, 1, d)[0]
    anchor = rng.normal(d)
    along = rng.uniform(-length / 2.0, length / 2.0, n_in)
    noise = _orthogonal_noise(rng, n_in, direction, sigma) if sigma > 0 else np.zeros((n_in, d))
    inliers = anchor + np.outer(along, direction) + noise
    width = float(np.max(np.linalg.norm(noise, axis=1)))

    reach = separation * max(width, 0.01 * length)
    offsets = _orthogonal_noise(rng, n_out, direction, 1.0)
    norms = np.linalg.norm(offsets, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    outliers = (
        anchor
        + np.outer(rng.uniform(-length / 2.0, length / 2.0, n_out), direction)
        + offsets / norms * (reach * _outlier_factors(rng, n_out))[:, None]
    )

    rows, inlier_idx = _shuffled(rng, inliers, outliers.reshape(n_out, d))
    truth = PlantedTruth(
        inlier_indices=inlier_idx,
        optimum_size=width,
        family='line-with-noise',
        extra={'anchor': anchor.tolist(), 'direction': direction.tolist(), 'sigma': sigma, 'gamma': gamma},
    )
    return PointSet(rows), gamma, truth


def k_clusters(params: dict, rng: RngStream, max_attempts: int = 100) -> tuple[PointSet, float, PlantedTruth]:
    """k uniform balls with well separated centers; outliers far from every center."""
    n, d, k, gamma = int(params['n']), int(params['d']), int(params['k']), float(params['gamma'])
    radius, separation = float(params['radius']), float(params['separation'])
    _check_positive(params, 'd', 'k', 'radius', 'separation')
    n_in, n_out = _split_counts(n, gamma)
    if n_in < k:
        raise ValueError(f"n={n} leaves fewer than k={k} inliers")

    spacing = separation * radius
    for _ in range(max_attempts):
        centers = _unit_vectors(rng, k, d) * spacing
        gaps = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=2)
        if k == 1 or np.min(gaps[np.triu_indices(k, 1)]) >= 4.0 * radius:
            break
    else:
        raise ValueError(f"could not place {k} separated centers in d={d}")

    assignment = np.arange(n_in) % k
    inliers = centers[assignment] + _uniform_ball(rng, n_in, d, radius)
    cluster_radii = [
        exact_meb(PointSet(inliers[assignment == j])).optimum_size for j in range(k)
    ]
    opt = float(max(cluster_radii))
    reach = spacing + separation * max(opt, radius * 1e-6)
    outliers = _unit_vectors(rng, n_out, d) * (reach * _outlier_factors(rng, n_out))[:, None]

    rows, inlier_idx = _shuffled(rng, inliers, outliers.reshape(n_out, d))
    truth = PlantedTruth(
        inlier_indices=inlier_idx,
        optimum_size=opt,
        family='k-clusters',
        extra={
            'k': k,
            'centers': centers.tolist(),
            'cluster_radii': cluster_radii,
            'separation': separation,
            'gamma': gamma,
        },
    )
    return PointSet(rows), gamma, truth


def satellite(params: dict, rng: RngStream) -> tuple[PointSet, float, PlantedTruth]:
    """
    A uniform ball plus a small satellite cluster holding ceil(fraction n)
    points at `distance` radii from the center. Removing the satellite
    shrinks the MEB radius by the recorded `removal_shrink`, so the instance
    is unstable at beta = fraction for every alpha below it.
    """
    n, d = int(params['n']), int(params['d'])
    fraction, distance, radius = float(params['fraction']), float(params['distance']), float(params['radius'])
    _check_positive(params, 'd', 'radius', 'distance')
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    n_sat = safe_ceil(fraction * n)
    n_core = n - n_sat
    if n_core < 1:
        raise ValueError(f"n={n} is too small for fraction={fraction}")

    core = _uniform_ball(rng, n_core, d, radius)
    direction = _unit_vectors(rng, 1, d)[0]
    sat = distance * radius * direction + _uniform_ball(rng, n_sat, d, 0.05 * radius)
    rows, core_idx = _shuffled(rng, core, sat)

    points = PointSet(rows)
    full = exact_meb(points)
    core_radius = exact_meb(PointSet(core)).optimum_size
    shrink = 1.0 - core_radius / full.optimum_size if full.optimum_size > 0 else 0.0
    satellite_idx = np.setdiff1d(np.arange(n), core_idx)
    truth = PlantedTruth(
        inlier_indices=np.arange(n),
        optimum_size=full.optimum_size,
        optimum_center=full.optimum_center.vector,
        family='satellite',
        extra={
            'fraction': fraction,
            'core_radius': core_radius,
            'removal_shrink': shrink,
            'satellite_indices': satellite_idx.tolist(),
        },
    )
    return points, 0.0, truth


FAMILIES = {
    'uniform-ball': uniform_ball,
    'simplex': simplex,
    'planted-outliers': planted_outliers,
    'two-class-margin': two_class_margin,
    'one-class-margin': one_class_margin,
    'line-with-noise': line_with_noise,
    'k-clusters': k_clusters,
    'satellite': satellite,
}


def generate(kind: str, params: dict | None, rng: RngStream) -> tuple[PointSet, float, PlantedTruth]:
    """
    Generate an instance of a registered family.

    Args:
        kind: Family name (see FAMILIES).
        params: Family parameters; missing keys take FAMILY_DEFAULTS values.
        rng: Random stream.

    Returns:
        (points, gamma, truth).

    Raises:
        ValueError: For an unknown family, unknown parameter or invalid value.
    """
    if kind not in FAMILIES:
        raise ValueError(f"unknown instance family '{kind}' (choose from {', '.join(FAMILIES)})")
    merged = dict(FAMILY_DEFAULTS[kind])
    for key, value in (params or {}).items():
        if value is None:
            continue
        if key not in merged:
            raise ValueError(f"family '{kind}' has no parameter '{key}'")
        merged[key] = value

    points, gamma, truth = FAMILIES[kind](merged, rng)
    truth.extra.setdefault('params', merged)
    logger.info(f"Generated {kind}: n={points.n}, d={points.d}, gamma={gamma}, optimum={truth.optimum_size:.6g}")
    return points, gamma, truth
