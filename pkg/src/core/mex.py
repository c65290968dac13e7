"""
Enclosing shapes with outliers beyond single balls.

k-center with outliers keeps k core-sets and branches over which cluster
each drawn point joins; line fitting grows a line by repeatedly spanning a
2-flat with a far point and picking the best line from a candidate grid on
it. Both run in linear mode (exact ranks, one pass per evaluation) or
sublinear mode (adaptive draws and sandwich estimates).
"""

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from ..models import (
    PointSet,
    Center,
    KBallUnion,
    Slab,
    OutlierInstance,
    BiCriteriaParams,
    SolverConfig,
    RunTrace,
    SolveReport,
)
from ..utils import (
    get_logger,
    safe_ceil,
    exclusion_count,
    argmax_lowest,
    ordered_map,
    RefusalError,
    RngStream,
)
from .generalized import (
    generalized_rank,
    generalized_uniform_adaptive,
    generalized_sandwich,
    generalized_sandwich_value,
)
from .kernels import Kernel, LINEAR
from .meb_core import approx_center
from .meb_outliers import (
    bicriteria_linear,
    bicriteria_sublinear,
    scheduled_repetitions,
)
from .shapes import BallFamily, KBallFamily, SlabFamily, LineCenter

logger = get_logger(__name__)

__all__ = [
    'generalized_rank',
    'generalized_uniform_adaptive',
    'generalized_sandwich',
    'generalized_sandwich_value',
    'kcenter_additions',
    'kcenter_budget_exceeded',
    'kcenter_outliers',
    'line_rounds',
    'line_delta0',
    'candidate_lines',
    'line_fit_outliers',
]


def _sublinear_eta2(params: BiCriteriaParams, config: SolverConfig, evaluations: int) -> float:
    return params.eta2 or min(config.sampling.eta2_constant / max(evaluations, 1), 0.5)


def _check_sublinear(gamma: float, delta: float) -> None:
    if not delta < gamma / 3.0:
        raise ValueError(
            f"sublinear mode needs delta / 5 < gamma / 3 (delta / 5={delta}, gamma={gamma})"
        )


def _rank_draw(
    points: PointSet,
    family,
    center,
    t: int,
    rng: RngStream,
    trace: RunTrace,
    debug: bool = False
) -> tuple[float, int, int]:
    """Rank size, a uniform draw from the t largest-f points (the largest at t = 0) and the coverage."""
    if t == 0:
        f = family.f_values(points, center, None, trace)
        return float(family.size_from_f(f.max())), argmax_lowest(f), points.n
    Q, size = generalized_rank(points, family, center, t, trace=trace, debug=debug)
    return size, int(Q[rng.index(Q.size)]), points.n - Q.size


# ----- k-center -----

def kcenter_additions(k: int, epsilon: float) -> int:
    """Points added along one branch: k (ceil(2 / eps) + 1)."""
    return k * (safe_ceil(2.0 / epsilon) + 1)


def kcenter_budget_exceeded(k: int, additions: int, cap: int) -> bool:
    """Whether k^additions branches exceed the enumeration cap."""
    if k == 1:
        return False
    return additions * math.log(k) > math.log(cap)


@dataclass
class _Incumbent:
    centers: tuple[Center, ...] | None = None
    size: float = float('inf')
    coverage: int | None = None
    nodes: int = 0
    max_depth: int = 0


@dataclass
class _BranchContext:
    points: PointSet
    k: int
    additions: int
    t: int
    gamma: float
    delta: float
    eta1: float
    eta2: float | None
    xi: float
    kernel: Kernel
    config: SolverConfig
    trace: RunTrace = field(default_factory=RunTrace)

    @property
    def sublinear(self) -> bool:
        return self.eta2 is not None


def _evaluate(ctx: _BranchContext, family: KBallFamily, centers, rng: RngStream):
    """Size of the current k-ball candidate and the next drawn point."""
    points = ctx.points
    if ctx.sublinear:
        sampling = ctx.config.sampling
        size = generalized_sandwich(
            points, family, centers, ctx.gamma, ctx.delta, ctx.eta2, rng, sampling.c3, ctx.trace
        )
        draw = generalized_uniform_adaptive(
            points, family, centers, ctx.gamma, ctx.delta, ctx.eta1, rng, sampling.c2, ctx.trace
        )
        return size, draw, None

    return _rank_draw(points, family, centers, ctx.t, rng, ctx.trace, ctx.config.mex.debug_rank_witness)


def _branch(
    ctx: _BranchContext,
    clusters: list[list[int]],
    centers: list[Center | None],
    depth: int,
    rng: RngStream,
    best: _Incumbent
) -> None:
    best.nodes += 1
    best.max_depth = max(best.max_depth, depth)
    family = KBallFamily(ctx.kernel)
    current = tuple(c for c in centers if c is not None)
    size, draw, coverage = _evaluate(ctx, family, current, rng)

    if size < best.size:
        best.centers, best.size, best.coverage = current, size, coverage
        logger.debug(f"k-center: new incumbent {size:.6g} at depth {depth}")
    if depth >= ctx.additions:
        return

    first_empty = True
    for j in range(ctx.k):
        if not clusters[j]:
            # empty clusters are interchangeable
            if not first_empty:
                continue
            first_empty = False
        clusters[j].append(draw)
        previous = centers[j]
        centers[j] = approx_center(ctx.points, clusters[j], ctx.xi, ctx.kernel, ctx.config.core_set)
        _branch(ctx, clusters, centers, depth + 1, rng.child(j), best)
        centers[j] = previous
        clusters[j].pop()


def _kcenter_repetition(ctx: _BranchContext, rng: RngStream) -> tuple[_Incumbent, RunTrace]:
    ctx = replace(ctx, trace=RunTrace())
    first = rng.index(ctx.points.n)
    clusters: list[list[int]] = [[first]] + [[] for _ in range(ctx.k - 1)]
    centers: list[Center | None] = [Center.point(first)] + [None] * (ctx.k - 1)
    best = _Incumbent()
    _branch(ctx, clusters, centers, 1, rng.child(0), best)
    return best, ctx.trace


def kcenter_outliers(
    inst: OutlierInstance,
    k: int,
    params: BiCriteriaParams,
    rng: RngStream,
    sublinear: bool = False,
    kernel: Kernel = LINEAR,
    config: SolverConfig | None = None
) -> tuple[KBallUnion, SolveReport]:
    """
    (1 + eps, 1 - delta) bi-criteria k-center with outliers.

    Depth-first search over cluster assignments: each node draws a point
    from the far tail of the current k-ball union and branches over the k
    core-sets it may join, up to k (ceil(2 / eps) + 1) additions per branch.
    Every node is a candidate and every branch runs to full depth. k = 1
    runs the single-ball solver.

    Raises:
        ValueError: If k < 1.
        RefusalError: If k^(k (ceil(2 / eps) + 1)) exceeds the enumeration cap.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    started = time.time()
    config = config or SolverConfig()
    points, gamma = inst.points, inst.gamma
    additions = kcenter_additions(k, params.epsilon)
    cap = config.mex.enumeration_cap

    if kcenter_budget_exceeded(k, additions, cap):
        raise RefusalError(
            f"k-center enumeration needs {k}^{additions} branches, above the cap of {cap}",
            reason='budget',
        )

    if k == 1:
        solver = bicriteria_sublinear if sublinear else bicriteria_linear
        ball, report = solver(inst, params, rng, kernel, config)
        union = KBallUnion((ball.center,), ball.radius)
        report.algorithm = 'kcenter'
        report.parameters['k'] = 1
        report.parameters['sublinear'] = sublinear
        report.result = union.to_dict()
        logger.info(f"kcenter_outliers: k=1, radius={ball.radius:.6g}")
        return union, report

    epsilon = params.epsilon
    s = epsilon / (2.0 + epsilon)
    xi = s * epsilon / (1.0 + epsilon)
    delta = params.delta / 5.0 if sublinear else params.delta
    t = exclusion_count(points.n, gamma, params.delta)
    trace = RunTrace()
    if sublinear:
        _check_sublinear(gamma, delta)
    repetitions = scheduled_repetitions(params, gamma, delta, additions, sublinear, config, trace)
    eta2 = _sublinear_eta2(params, config, additions * repetitions) if sublinear else None

    ctx = _BranchContext(points, k, additions, t, gamma, delta, params.eta1, eta2, xi, kernel, config)
    logger.info(
        f"kcenter_outliers: k={k}, additions={additions}, t={t}, "
        f"repetitions={repetitions}, sublinear={sublinear}"
    )
    outcomes = ordered_map(
        lambda rep: _kcenter_repetition(ctx, rng.child(rep)),
        range(repetitions),
        config.runtime.threads,
    )

    for _, rep_trace in outcomes:
        trace.merge(rep_trace)
    best = min((o[0] for o in outcomes), key=lambda b: b.size)
    trace.notes.update({
        'max_additions': additions,
        'deepest_branch': max(o[0].max_depth for o in outcomes),
        'nodes': sum(o[0].nodes for o in outcomes),
    })
    if sublinear:
        trace.notes['eta2'] = eta2

    union = KBallUnion(best.centers, best.size)
    report = SolveReport.for_run(
        'kcenter',
        points.digest(),
        rng.seed,
        {'gamma': gamma, 'k': k, **params.to_dict(), 'sublinear': sublinear,
         'repetitions': repetitions, 'kernel': kernel.to_dict()},
        union.to_dict(),
        trace,
        started,
        coverage=best.coverage,
    )
    logger.info(f"kcenter_outliers: radius={union.radius:.6g} over {trace.notes['nodes']} nodes")
    return union, report


# ----- line fitting -----

def line_rounds(epsilon: float, cap: int) -> int:
    """nu = ceil(eps^-3 ln(1 / eps)), capped."""
    return max(1, min(safe_ceil(epsilon ** -3 * math.log(1.0 / epsilon)), cap))


def line_delta0(delta: float, nu: int) -> float:
    """delta_0 = delta / (nu + 1)."""
    return delta / (nu + 1)


def candidate_lines(line: LineCenter, p: np.ndarray, budget: int) -> list[LineCenter]:
    """
    Candidate lines on the 2-flat spanned by a line and a point.

    A grid of directions (angles in [-pi/2, pi/2) from the line's direction)
    through a grid of anchors between the foot of p on the line and p. The
    line itself is always the first candidate. Returns only the line when p
    lies on it.
    """
    e1 = line.direction
    along = float((p - line.anchor) @ e1)
    foot = line.anchor + along * e1
    offset = p - foot
    h = float(np.linalg.norm(offset))
    if h <= 1e-12 * max(1.0, float(np.linalg.norm(p))):
        return [line]
    e2 = offset / h

    n_angles = max(1, int(math.isqrt(budget)))
    n_offsets = max(1, budget // n_angles)
    angles = np.pi * np.arange(n_angles) / n_angles
    angles = np.where(angles >= np.pi / 2, angles - np.pi, angles)
    offsets = np.linspace(0.0, h, n_offsets) if n_offsets > 1 else np.array([0.0])

    lines = [line]
    for o in offsets:
        for theta in angles:
            if o == 0.0 and theta == 0.0:
                continue
            direction = math.cos(theta) * e1 + math.sin(theta) * e2
            direction = direction / np.linalg.norm(direction)
            lines.append(LineCenter(foot + o * e2, direction))
    return lines


@dataclass
class _LineOutcome:
    line: LineCenter
    width: float
    coverage: int | None
    trace: RunTrace
    rounds_run: int = 0


def _line_repetition(
    points: PointSet,
    gamma: float,
    delta0: float,
    delta_rank: float,
    t_far: int,
    t_rank: int,
    nu: int,
    budget: int,
    eta1: float,
    eta2: float | None,
    config: SolverConfig,
    rng: RngStream
) -> _LineOutcome:
    trace = RunTrace()
    family = SlabFamily()
    sampling = config.sampling

    def draw_far(center) -> int:
        fam = family if isinstance(center, LineCenter) else BallFamily()
        if eta2 is not None:
            return generalized_uniform_adaptive(
                points, fam, center, gamma, delta0, eta1, rng, sampling.c2, trace
            )
        return _rank_draw(points, fam, center, t_far, rng, trace)[1]

    def score(line: LineCenter) -> tuple[float, int | None]:
        if eta2 is not None:
            width = generalized_sandwich(
                points, family, line, gamma, delta_rank, eta2, rng, sampling.c3, trace
            )
            return width, None
        Q, width = generalized_rank(
            points, family, line, t_rank, trace=trace, debug=config.mex.debug_rank_witness
        )
        return width, points.n - Q.size

    p_delta = rng.index(points.n)
    anchor = points.rows_dense([p_delta])[0]
    q_delta = draw_far(Center.point(p_delta))
    line = LineCenter.through(anchor, points.rows_dense([q_delta])[0])
    width, coverage = score(line)
    best = _LineOutcome(line, width, coverage, trace)

    for round_index in range(1, nu + 1):
        p = points.rows_dense([draw_far(line)])[0]
        scored = [(score(c), c) for c in candidate_lines(line, p, budget)]
        (width, coverage), line = min(scored, key=lambda item: item[0][0])
        best.rounds_run = round_index
        if width < best.width:
            best.line, best.width, best.coverage = line, width, coverage
    return best


def line_fit_outliers(
    inst: OutlierInstance,
    params: BiCriteriaParams,
    rng: RngStream,
    candidate_budget: int | None = None,
    sublinear: bool = False,
    config: SolverConfig | None = None
) -> tuple[Slab, SolveReport]:
    """
    (1 + eps, 1 - delta) bi-criteria line fitting (slab) with outliers.

    Starts from the line through a random point and a point drawn from its
    far (delta_0 + gamma) n set, then runs nu rounds: draw a far point p_i
    from the current line's far set, span the 2-flat with p_i and keep the
    best candidate line on it. delta_0 = delta / (nu + 1).

    Args:
        inst: Points and outlier fraction.
        params: epsilon, delta, eta1, eta2, repetitions.
        rng: Random stream.
        candidate_budget: Candidate lines per 2-flat (config default when None).
        sublinear: Use adaptive draws and sandwich widths.
        config: Solver configuration.

    Raises:
        ValueError: If d < 2, or sublinear mode is requested with
            delta / 5 >= gamma / 3.
    """
    points, gamma = inst.points, inst.gamma
    if points.d < 2:
        raise ValueError(f"line fitting needs d >= 2, got d={points.d}")
    started = time.time()
    config = config or SolverConfig()
    budget = candidate_budget or config.mex.candidate_budget
    if budget < 1:
        raise ValueError(f"candidate_budget must be >= 1, got {budget}")

    nu = line_rounds(params.epsilon, config.mex.max_line_rounds)
    delta0 = line_delta0(params.delta, nu)
    delta_rank = params.delta / 5.0 if sublinear else params.delta
    t_far = exclusion_count(points.n, gamma, delta0)
    t_rank = exclusion_count(points.n, gamma, params.delta)
    trace = RunTrace()
    eta2 = None
    if sublinear:
        _check_sublinear(gamma, delta_rank)
        delta0 = delta0 / 5.0
    # nu + 1 far draws per run: q_delta and one per round
    repetitions = scheduled_repetitions(params, gamma, delta0, nu + 1, sublinear, config, trace)
    if sublinear:
        eta2 = _sublinear_eta2(params, config, (nu * budget + 1) * repetitions)

    logger.info(
        f"line_fit_outliers: nu={nu}, delta0={delta0:.4g}, budget={budget}, "
        f"repetitions={repetitions}, sublinear={sublinear}"
    )
    outcomes = ordered_map(
        lambda rep: _line_repetition(
            points, gamma, delta0, delta_rank, t_far, t_rank, nu, budget,
            params.eta1, eta2, config, rng.child(rep)
        ),
        range(repetitions),
        config.runtime.threads,
    )
    for outcome in outcomes:
        trace.merge(outcome.trace)
    best = min(outcomes, key=lambda o: o.width)
    trace.notes.update({'nu': nu, 'delta0': delta0, 'candidate_budget': budget})
    if nu == config.mex.max_line_rounds:
        trace.flag('line-rounds-capped')

    slab = Slab(best.line.anchor, best.line.direction, best.width)
    report = SolveReport.for_run(
        'linefit',
        points.digest(),
        rng.seed,
        {'gamma': gamma, **params.to_dict(), 'sublinear': sublinear, 'repetitions': repetitions},
        slab.to_dict(),
        trace,
        started,
        coverage=best.coverage,
    )
    logger.info(f"line_fit_outliers: width={slab.width:.6g}")
    return slab, report
