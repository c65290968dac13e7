"""
Polytope distance and margin SVMs with outliers.

Gilbert's algorithm moves v towards the input point with the smallest
projection onto v and keeps the point of the segment closest to the origin,
so ||v|| never increases. The one-class solver runs the same loop on points
drawn from the far side of the current hyperplane; the two-class solver
runs it on differences p1 - p2 of the two classes without materialising the
difference set.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from ..models import (
    PointSet,
    Center,
    HalfSpaceMargin,
    TwoClassMargin,
    GilbertResult,
    OutlierInstance,
    BiCriteriaParams,
    SolverConfig,
    RunTrace,
    SolveReport,
    uniform_sample,
    stack_point_sets,
)
from ..utils import (
    get_logger,
    safe_ceil,
    exclusion_count,
    top_t,
    kth_largest,
    argmax_lowest,
    ordered_map,
    RefusalError,
    RngStream,
)
from .generalized import generalized_uniform_adaptive, generalized_sandwich_value
from .kernels import Kernel, LINEAR
from .meb_outliers import scheduled_repetitions
from .shapes import HalfSpaceFamily

logger = get_logger(__name__)

MAX_GILBERT_ITERATIONS = 1_000_000
UNDERFLOW_RATIO = 1e-12
# child index of the scale-estimation stream, disjoint from repetition indices
SCALE_STREAM = 1 << 32


class MarginVector:
    """
    The running vector v as a signed combination of basis rows.

    With the linear kernel the explicit vector is kept as well; with the
    rbf kernel every inner product goes through the kernel expansion.
    """

    def __init__(self, basis: PointSet, kernel: Kernel, rows, signs):
        self._basis = basis
        self._kernel = kernel
        self._coef: dict[int, float] = {}
        for row, sign in zip(rows, signs):
            self._coef[int(row)] = self._coef.get(int(row), 0.0) + float(sign)
        self._vector = None
        self._arrays = None
        if kernel.is_linear:
            self._vector = np.asarray(signs, dtype=np.float64) @ basis.rows_dense(list(rows))
            self._sq_norm = float(self._vector @ self._vector)
        else:
            self._sq_norm = self._element_sq_norm(rows, signs)

    @property
    def sq_norm(self) -> float:
        return self._sq_norm

    @property
    def norm(self) -> float:
        return math.sqrt(self._sq_norm)

    @property
    def vector(self) -> np.ndarray | None:
        """Explicit v (linear kernel only)."""
        return None if self._vector is None else np.array(self._vector)

    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """(support rows, signed coefficients), ascending rows."""
        if self._arrays is None:
            support = np.array(sorted(self._coef), dtype=np.int64)
            coef = np.array([self._coef[i] for i in support], dtype=np.float64)
            self._arrays = (support, coef)
        return self._arrays

    def unit_normal(self) -> np.ndarray | None:
        if self._vector is None or self._sq_norm == 0.0:
            return None
        return self._vector / self.norm

    def _inner_rows(self, rows) -> np.ndarray:
        """<phi(b_r), v> for basis rows r."""
        if self._vector is not None:
            return self._basis.inner(self._vector, rows)
        support, coef = self.coefficients()
        return self._kernel.cross(self._basis, rows, support) @ coef

    def _element_sq_norm(self, rows, signs) -> float:
        signs = np.asarray(signs, dtype=np.float64)
        return float(signs @ self._kernel.cross(self._basis, list(rows), list(rows)) @ signs)

    def project(self, points: PointSet, idx=None) -> np.ndarray:
        """<phi(p), v / ||v||> for the selected rows of any point set of the basis dimension."""
        norm = self.norm
        if norm == 0.0:
            return np.zeros(points.count(idx))
        if self._vector is not None:
            return points.inner(self._vector, idx) / norm
        support, coef = self.coefficients()
        return self._kernel.between(points, idx, self._basis, support) @ coef / norm

    def step_toward(self, rows, signs) -> float:
        """
        Move v to the point of segment [v, w] closest to the origin, with
        w = sum_k signs[k] phi(basis[rows[k]]).

        Returns:
            The step length lambda in [0, 1]; 0 when no step decreases ||v||.
        """
        signs = np.asarray(signs, dtype=np.float64)
        vw = float(signs @ self._inner_rows(list(rows)))
        ww = self._element_sq_norm(rows, signs)
        vv = self._sq_norm
        numerator = vv - vw
        denominator = vv - 2.0 * vw + ww
        if numerator <= 0.0 or denominator <= 0.0:
            return 0.0
        lam = min(1.0, numerator / denominator)

        if self._vector is not None:
            vector = (1.0 - lam) * self._vector + lam * (signs @ self._basis.rows_dense(list(rows)))
            new_sq = float(vector @ vector)
        else:
            vector = None
            new_sq = max((1.0 - lam) ** 2 * vv + 2.0 * lam * (1.0 - lam) * vw + lam ** 2 * ww, 0.0)
        if new_sq >= vv:
            return 0.0

        for key in self._coef:
            self._coef[key] *= 1.0 - lam
        for row, sign in zip(rows, signs):
            self._coef[int(row)] = self._coef.get(int(row), 0.0) + lam * float(sign)
        self._coef = {k: c for k, c in self._coef.items() if c != 0.0}
        self._arrays = None
        self._vector = vector
        self._sq_norm = new_sq
        return lam

    def snapshot(self) -> 'MarginVector':
        """Independent copy for candidate bookkeeping."""
        clone = object.__new__(MarginVector)
        clone._basis = self._basis
        clone._kernel = self._kernel
        clone._coef = dict(self._coef)
        clone._vector = None if self._vector is None else np.array(self._vector)
        clone._arrays = self._arrays
        clone._sq_norm = self._sq_norm
        return clone


def estimate_scale(points: PointSet, kernel: Kernel, samples: int, rng: RngStream) -> tuple[float, float]:
    """(squared diameter, smallest norm) over one uniform sample; the norm stands in for rho."""
    sample = np.unique(uniform_sample(points, max(samples, 1), rng))
    K = kernel.cross(points, sample, sample)
    diag = np.diag(K)
    return float(np.max(diag[:, None] + diag[None, :] - 2.0 * K)), math.sqrt(float(np.min(diag)))


def estimate_sq_diameter(points: PointSet, kernel: Kernel, samples: int, rng: RngStream) -> float:
    """Largest squared feature distance among `samples` uniformly drawn points."""
    return estimate_scale(points, kernel, samples, rng)[0]


def gilbert_iteration_bound(sq_diameter: float, rho: float, epsilon: float) -> int:
    """2 ceil(2E / eps) with E = D^2 / rho^2."""
    if rho <= 0.0:
        return MAX_GILBERT_ITERATIONS
    e_value = sq_diameter / rho ** 2
    return min(2 * safe_ceil(2.0 * e_value / epsilon), MAX_GILBERT_ITERATIONS)


def _underflow_scale(points: PointSet, kernel: Kernel) -> float:
    return UNDERFLOW_RATIO * max(1.0, math.sqrt(float(np.max(kernel.diagonal(points)))))


def gilbert(
    points: PointSet,
    iterations: int | None = None,
    epsilon: float | None = None,
    kernel: Kernel = LINEAR,
    config: SolverConfig | None = None,
    rng: RngStream | None = None
) -> GilbertResult:
    """
    Approximate minimum-norm point of the convex hull of P.

    Starts at the input point closest to the origin. Each iteration picks
    p_i = argmin <p, v_i> (lowest index on ties) and moves to the closest
    point to the origin on [v_i, p_i].

    Args:
        points: Point set.
        iterations: Fixed iteration count N.
        epsilon: Relative error; runs 2 ceil(2E / eps) iterations with
            E = D^2 / rho^2 estimated from a sampled diameter and the current
            ||v||, refreshed periodically.
        kernel: Feature space.
        config: Sampling and refresh constants.
        rng: Stream for the diameter sample (epsilon mode).

    Returns:
        GilbertResult with the center as a convex combination and the
        non-increasing norm history.

    Raises:
        ValueError: Unless exactly one of iterations and epsilon is given.
    """
    if (iterations is None) == (epsilon is None):
        raise ValueError("give exactly one of iterations and epsilon")
    if iterations is not None and iterations < 0:
        raise ValueError(f"iterations must be >= 0, got {iterations}")
    if epsilon is not None and not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    config = config or SolverConfig()
    mex = config.mex

    start = int(np.argmin(kernel.diagonal(points)))
    v = MarginVector(points, kernel, [start], [1.0])
    history = [v.norm]
    flags: list[str] = []
    underflow = _underflow_scale(points, kernel)

    e_value = None
    sq_diameter = 0.0
    if epsilon is not None:
        sq_diameter = estimate_sq_diameter(points, kernel, mex.gilbert_diameter_samples, rng or RngStream(0))
        limit = gilbert_iteration_bound(sq_diameter, v.norm, epsilon)
        e_value = sq_diameter / v.sq_norm if v.sq_norm > 0 else float('inf')
    else:
        limit = iterations

    done = 0
    while done < limit:
        if v.norm <= underflow:
            flags.append('origin-inside-hull')
            break
        j = int(np.argmin(v.project(points)))
        if v.step_toward([j], [1.0]) == 0.0:
            flags.append('converged')
            break
        done += 1
        history.append(v.norm)
        if epsilon is not None and done % mex.gilbert_refresh_interval == 0:
            limit = gilbert_iteration_bound(sq_diameter, v.norm, epsilon)
            e_value = sq_diameter / v.sq_norm if v.sq_norm > 0 else float('inf')
    if done >= MAX_GILBERT_ITERATIONS:
        flags.append('iteration-cap')

    distance = v.norm
    if distance <= underflow:
        distance = 0.0
        if 'origin-inside-hull' not in flags:
            flags.append('origin-inside-hull')
    support, coef = v.coefficients()
    logger.debug(f"gilbert: {done} iterations, distance={distance:.6g}, flags={flags}")
    return GilbertResult(
        center=Center.combination(support, coef),
        distance=distance,
        iterations=done,
        norm_history=np.array(history),
        flags=flags,
        estimated_e=e_value,
    )


def svm_rounds(params: BiCriteriaParams, config: SolverConfig, sq_diameter: float, rho: float) -> int:
    """Round count z: params.z, else 2 ceil(2E / eps) capped by the configured maximum."""
    if params.z is not None:
        return params.z
    return max(1, min(gilbert_iteration_bound(sq_diameter, rho, params.epsilon), config.mex.max_svm_rounds))


def _sublinear_eta2(params: BiCriteriaParams, config: SolverConfig, evaluations: int) -> float:
    return params.eta2 or min(config.sampling.eta2_constant / max(evaluations, 1), 0.5)


def _draw_from_tail(points: PointSet, family: HalfSpaceFamily, v: MarginVector, t: int,
                    rng: RngStream, trace: RunTrace) -> int:
    f = family.f_values(points, v, None, trace)
    pool, _ = top_t(f, t)
    if pool.size == 0:
        return argmax_lowest(f)
    return int(pool[rng.index(pool.size)])


# ----- one class -----

@dataclass
class _MarginOutcome:
    v: MarginVector | None
    margin: float
    round: int
    trace: RunTrace
    coverage: int | None = None
    underflow: bool = False
    final_norm: float = 0.0


def _one_class_repetition(
    points: PointSet,
    gamma: float,
    delta: float,
    t_draw: int,
    t_rank: int,
    z: int,
    eta1: float,
    eta2: float | None,
    kernel: Kernel,
    config: SolverConfig,
    rng: RngStream
) -> _MarginOutcome:
    trace = RunTrace()
    family = HalfSpaceFamily()
    sampling = config.sampling
    underflow = _underflow_scale(points, kernel)
    v = MarginVector(points, kernel, [rng.index(points.n)], [1.0])
    best = _MarginOutcome(None, -math.inf, 0, trace)

    for round_index in range(1, z + 1):
        if v.norm <= underflow:
            best.underflow = True
            trace.flag('origin-inside-hull')
            break
        if eta2 is not None:
            margin = -generalized_sandwich_value(
                points, family, v, gamma, delta, eta2, rng, sampling.c3, trace
            )
            coverage = None
        else:
            f = family.f_values(points, v, None, trace)
            margin = -kth_largest(f, t_rank + 1)
            coverage = int(np.count_nonzero(-f >= margin))
        if margin > best.margin:
            best.v, best.margin, best.round, best.coverage = v.snapshot(), margin, round_index, coverage
        if round_index == z:
            break
        if eta2 is not None:
            p = generalized_uniform_adaptive(points, family, v, gamma, delta, eta1, rng, sampling.c2, trace)
        else:
            p = _draw_from_tail(points, family, v, t_draw, rng, trace)
        v.step_toward([p], [1.0])
    best.final_norm = v.norm
    return best


def svm_one_class_outliers(
    inst: OutlierInstance,
    params: BiCriteriaParams,
    rng: RngStream,
    sublinear: bool = False,
    kernel: Kernel = LINEAR,
    config: SolverConfig | None = None
) -> tuple[HalfSpaceMargin, SolveReport]:
    """
    One-class max-margin half-space with outliers.

    Gilbert-style loop whose update point is drawn from the (delta + gamma) n
    points with the smallest projection onto v (exactly in linear mode, by
    uniform-adaptive sampling in sublinear mode). Every round's v is a
    candidate scored by its rank margin (the (t+1)-th smallest projection
    with t = (n - ceil((1 - gamma) n)) + floor(delta n), or its sandwich
    estimate); the widest margin wins.

    Raises:
        ValueError: In sublinear mode unless delta / 5 < gamma / 3.
        RefusalError: If no repetition finds a positive margin (infeasible).
    """
    started = time.time()
    config = config or SolverConfig()
    points, gamma = inst.points, inst.gamma
    delta = params.delta / 5.0 if sublinear else params.delta
    if sublinear and not delta < gamma / 3.0:
        raise ValueError(
            f"sublinear mode needs delta / 5 < gamma / 3 (delta={params.delta}, gamma={gamma})"
        )

    trace = RunTrace()
    sq_diameter, rho_guess = estimate_scale(points, kernel, config.mex.gilbert_diameter_samples, rng.child(SCALE_STREAM))
    z = svm_rounds(params, config, sq_diameter, rho_guess)
    t = exclusion_count(points.n, gamma, params.delta)
    repetitions = scheduled_repetitions(params, gamma, delta, z, sublinear, config, trace)
    eta2 = _sublinear_eta2(params, config, z * repetitions) if sublinear else None

    logger.info(f"svm_one_class_outliers: z={z}, t={t}, repetitions={repetitions}, sublinear={sublinear}")
    outcomes = ordered_map(
        lambda rep: _one_class_repetition(
            points, gamma, delta, t, t, z, params.eta1, eta2, kernel, config, rng.child(rep)
        ),
        range(repetitions),
        config.runtime.threads,
    )
    for outcome in outcomes:
        trace.merge(outcome.trace)
    best = max(outcomes, key=lambda o: o.margin)
    if best.v is None or best.margin <= 0.0:
        raise RefusalError(
            f"no half-space separates the origin from (1 - delta - gamma) n points "
            f"(best margin {best.margin:.3g})",
            reason='infeasible',
        )

    support, coef = best.v.coefficients()
    margin = HalfSpaceMargin(
        margin=best.margin,
        v_norm=best.v.norm,
        normal=best.v.unit_normal(),
        combination=None if kernel.is_linear else Center.combination(support, coef),
    )
    trace.notes.update({
        'rounds': z,
        'estimated_e': sq_diameter / rho_guess ** 2 if rho_guess > 0 else None,
        'final_v_norm': best.final_norm,
        'best_round': best.round,
    })
    report = SolveReport.for_run(
        'svm1',
        points.digest(),
        rng.seed,
        {'gamma': gamma, **params.to_dict(), 'sublinear': sublinear,
         'repetitions': repetitions, 'kernel': kernel.to_dict(), 'eta2': eta2},
        margin.to_dict(),
        trace,
        started,
        coverage=best.coverage,
    )
    logger.info(f"svm_one_class_outliers: margin={margin.margin:.6g}")
    return margin, report


# ----- two classes -----

def _two_class_repetition(
    first: PointSet,
    second: PointSet,
    basis: PointSet,
    gammas: tuple[float, float],
    delta: float,
    t_draw: tuple[int, int],
    t_rank: tuple[int, int],
    z: int,
    eta1: float,
    eta2: float | None,
    kernel: Kernel,
    config: SolverConfig,
    rng: RngStream
) -> tuple[_MarginOutcome, tuple[float, float]]:
    trace = RunTrace()
    sampling = config.sampling
    # f = -<p, u> on the first class, +<p, u> on the second
    families = (HalfSpaceFamily(1.0), HalfSpaceFamily(-1.0))
    classes = (first, second)
    offset = first.n
    underflow = UNDERFLOW_RATIO * max(1.0, math.sqrt(float(np.max(kernel.diagonal(basis)))))

    v = MarginVector(basis, kernel, [rng.index(first.n), offset + rng.index(second.n)], [1.0, -1.0])
    best = _MarginOutcome(None, -math.inf, 0, trace)
    best_sides = (0.0, 0.0)

    for round_index in range(1, z + 1):
        if v.norm <= underflow:
            best.underflow = True
            trace.flag('origin-inside-hull')
            break
        values = []
        for c in (0, 1):
            if eta2 is not None:
                values.append(generalized_sandwich_value(
                    classes[c], families[c], v, gammas[c], delta, eta2, rng, sampling.c3, trace
                ))
            else:
                f = families[c].f_values(classes[c], v, None, trace)
                values.append(kth_largest(f, t_rank[c] + 1))
        upper, lower = -values[0], values[1]
        width = upper - lower
        if width > best.margin:
            best.v, best.margin, best.round = v.snapshot(), width, round_index
            best_sides = (upper, lower)
        if round_index == z:
            break

        draws = []
        for c in (0, 1):
            if eta2 is not None:
                draws.append(generalized_uniform_adaptive(
                    classes[c], families[c], v, gammas[c], delta, eta1, rng, sampling.c2, trace
                ))
            else:
                draws.append(_draw_from_tail(classes[c], families[c], v, t_draw[c], rng, trace))
        v.step_toward([draws[0], offset + draws[1]], [1.0, -1.0])
    best.final_norm = v.norm
    return best, best_sides


def svm_two_class_outliers(
    first: PointSet,
    second: PointSet,
    gamma1: float,
    gamma2: float,
    params: BiCriteriaParams,
    rng: RngStream,
    sublinear: bool = False,
    kernel: Kernel = LINEAR,
    config: SolverConfig | None = None
) -> tuple[TwoClassMargin, SolveReport]:
    """
    Two-class max-margin separation with per-class outliers.

    Runs Gilbert's loop on the difference set {p1 - p2} implicitly: v is a
    signed combination of both classes, p1 comes from the first class's
    smallest-projection tail and p2 from the second class's
    largest-projection tail, and v moves towards p1 - p2. Each candidate's
    width is upper - lower, where upper is the first class's rank projection
    and lower the second's, each excluding its class's outliers plus
    floor(5 delta n_c) points.

    Raises:
        ValueError: For an outlier fraction outside [0, 1), or in sublinear
            mode unless delta / 5 < gamma_c / 3 for both classes.
        RefusalError: If no candidate has a positive width (inseparable).
    """
    started = time.time()
    config = config or SolverConfig()
    for name, gamma in (('gamma1', gamma1), ('gamma2', gamma2)):
        if not 0.0 <= gamma < 1.0:
            raise ValueError(f"{name} must lie in [0, 1), got {gamma}")
    delta = params.delta / 5.0 if sublinear else params.delta
    if sublinear and not (delta < gamma1 / 3.0 and delta < gamma2 / 3.0):
        raise ValueError(
            f"sublinear mode needs delta / 5 < gamma_c / 3 (delta={params.delta}, gammas={gamma1}, {gamma2})"
        )

    factor = config.mex.two_class_exclusion_factor
    sizes = (first.n, second.n)
    gammas = (gamma1, gamma2)
    t_draw = tuple(exclusion_count(n, g, params.delta) for g, n in zip(gammas, sizes))
    t_rank = tuple(exclusion_count(n, g, factor * params.delta) for g, n in zip(gammas, sizes))

    trace = RunTrace()
    basis = stack_point_sets(first, second)
    sq_diameter = estimate_sq_diameter(basis, kernel, config.mex.gilbert_diameter_samples, rng.child(SCALE_STREAM))
    z = params.z or config.mex.max_svm_rounds
    # two draws per round, one per class
    repetitions = scheduled_repetitions(params, max(gammas), delta, 2 * z, sublinear, config, trace)
    eta2 = _sublinear_eta2(params, config, 2 * z * repetitions) if sublinear else None

    logger.info(
        f"svm_two_class_outliers: |P1|={first.n}, |P2|={second.n}, z={z}, "
        f"t_rank={t_rank}, sublinear={sublinear}"
    )
    outcomes = ordered_map(
        lambda rep: _two_class_repetition(
            first, second, basis, gammas, delta, t_draw, t_rank, z,
            params.eta1, eta2, kernel, config, rng.child(rep)
        ),
        range(repetitions),
        config.runtime.threads,
    )
    for outcome, _ in outcomes:
        trace.merge(outcome.trace)
    best, (upper, lower) = max(outcomes, key=lambda o: o[0].margin)
    if best.v is None or best.margin <= 0.0:
        raise RefusalError(
            f"the classes are not separable after removing the outlier budget "
            f"(best width {best.margin:.3g})",
            reason='infeasible',
        )

    support, coef = best.v.coefficients()
    margin = TwoClassMargin(
        upper=upper,
        lower=lower,
        v_norm=best.v.norm,
        normal=best.v.unit_normal(),
        coefficients={'support': support.tolist(), 'coef': coef.tolist(), 'first_class_size': first.n},
    )
    trace.notes.update({
        'rounds': z,
        'squared_diameter': sq_diameter,
        'final_v_norm': best.final_norm,
        'best_round': best.round,
        't_rank': list(t_rank),
    })
    report = SolveReport.for_run(
        'svm2',
        basis.digest(),
        rng.seed,
        {'gamma1': gamma1, 'gamma2': gamma2, **params.to_dict(), 'sublinear': sublinear,
         'repetitions': repetitions, 'kernel': kernel.to_dict(), 'eta2': eta2,
         'exclusion_factor': factor},
        margin.to_dict(),
        trace,
        started,
    )
    logger.info(f"svm_two_class_outliers: width={margin.width:.6g}")
    return margin, report
