"""
Picard and Mann iteration

Runs x_{n+1} = f(x_n) and x_{n+1} = W(x_n, ..., x_n, f x_n; alpha^n), tracks
the distance to a known fixed point u and, when a modulus delta is given,
the theoretical bound

    A(u, ..., u, x_n) <= prod_{k<n} [1 - (1 - delta) alpha_t^k] A(u, ..., u, x_0)
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .ametric_core import AMetricSpace, Point, as_point, evaluate, repeated_distance
from .constants import ITERATION, TOLERANCES
from .convexity import ConvexStructure, WeightsLike, combine
from .exceptions import DivergenceError, InputShapeError, InvalidModulusError, InvalidParameterError
from .maps import SelfMap
from .schedules import Schedule
from .tolerance import exceeds

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StopRule:
    """Stop after max_steps, or once cauchy_window consecutive steps move less than dist_tol"""

    max_steps: int = ITERATION.MAX_STEPS
    dist_tol: float = ITERATION.DIST_TOL
    cauchy_window: int = ITERATION.CAUCHY_WINDOW

    def __post_init__(self):
        if self.max_steps < 1:
            raise InvalidParameterError("max_steps", self.max_steps, "need >= 1")
        if not self.dist_tol > 0.0:
            raise InvalidParameterError("dist_tol", self.dist_tol, "need > 0")
        if self.cauchy_window < 1:
            raise InvalidParameterError("cauchy_window", self.cauchy_window, "need >= 1")


@dataclass(frozen=True)
class IterationStep:
    """One recorded iterate"""

    n: int
    x: Tuple[float, ...]
    dist_to_u: Optional[float] = None
    bound: Optional[float] = None

    @property
    def point(self) -> Point:
        return np.asarray(self.x, dtype=float)


@dataclass(frozen=True)
class IterationTrace:
    """Recorded run; ``residual`` is A(f x, ..., f x, x) at the final iterate"""

    method: str
    map_name: str
    steps: Tuple[IterationStep, ...]
    converged: bool
    limit: Optional[Tuple[float, ...]] = None
    residual: Optional[float] = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def iterates(self) -> np.ndarray:
        return np.array([step.x for step in self.steps], dtype=float)

    @property
    def distances(self) -> List[Optional[float]]:
        return [step.dist_to_u for step in self.steps]

    @property
    def bounds(self) -> List[Optional[float]]:
        return [step.bound for step in self.steps]

    def limit_is_fixed_point(self, tol: float = TOLERANCES.ABS) -> bool:
        """Stationary is not the same as fixed: the residual must vanish too"""
        return self.converged and self.residual is not None and self.residual <= tol

    def summary(self) -> dict:
        last = self.steps[-1]
        return {
            "method": self.method,
            "map": self.map_name,
            "steps": len(self.steps) - 1,
            "converged": self.converged,
            "limit": list(self.limit) if self.limit is not None else None,
            "residual": self.residual,
            "final_dist_to_u": last.dist_to_u,
            "final_bound": last.bound,
        }


class ConvergenceResult(NamedTuple):
    converged: bool
    limit: Optional[Point]


# ============================================================================
# Theoretical bound
# ============================================================================


def _validate_delta(delta: float) -> float:
    if not 0.0 <= delta < 1.0:
        raise InvalidModulusError(delta)
    return delta


class BoundTracker:
    """
    Running product A0 * prod [1 - (1 - delta) alpha_k]

    Switches to a log-space sum once the product drops below the
    underflow threshold.
    """

    def __init__(self, delta: float, a0: float):
        self.delta = _validate_delta(delta)
        if a0 < 0.0:
            raise InvalidParameterError("A0", a0, "need A0 >= 0")
        self.a0 = a0
        self._product = 1.0
        self._log: Optional[float] = None
        self._zero = a0 == 0.0

    @staticmethod
    def factor(delta: float, alpha: float) -> float:
        return 1.0 - (1.0 - delta) * alpha

    def advance(self, alpha: float) -> float:
        factor = self.factor(self.delta, alpha)
        if factor <= 0.0:
            self._zero = True
        elif self._log is None and self._product * factor >= ITERATION.LOG_SPACE_THRESHOLD:
            self._product *= factor
        else:
            if self._log is None:
                self._log = math.log(self._product)
            self._log += math.log(factor)
        return self.value

    @property
    def value(self) -> float:
        if self._zero:
            return 0.0
        if self._log is not None:
            return math.exp(self._log + math.log(self.a0))
        return self.a0 * self._product


def theoretical_bound(delta: float, schedule: Schedule, A0: float, n_steps: int) -> List[float]:
    """
    Running products A0 * prod_{k=0}^{n} [1 - (1 - delta) alpha_t^k] for n < n_steps

    Raises:
        InvalidModulusError: If delta is outside [0, 1)
    """
    tracker = BoundTracker(delta, A0)
    return [tracker.advance(schedule.alpha_t(k)) for k in range(n_steps)]


# ============================================================================
# Runners
# ============================================================================


def fixed_point_residual(space: AMetricSpace, f: SelfMap, x) -> float:
    """A(f x, ..., f x, x)"""
    point = as_point(x, space.dim)
    return repeated_distance(space, f.apply(point), point)


def _resolve_u(f: SelfMap, u) -> Optional[Point]:
    if u is not None:
        return np.asarray(u, dtype=float).reshape(f.dim)
    return f.fixed_point


def _iterate(
    space: AMetricSpace,
    f: SelfMap,
    x0,
    stop: StopRule,
    advance: Callable[[int, Point], Point],
    method: str,
    u: Optional[Point],
    tracker: Optional[BoundTracker] = None,
    alpha: Optional[Callable[[int], float]] = None,
) -> IterationTrace:
    if f.dim != space.dim:
        raise InputShapeError(f"map on R^{space.dim}", f"map on R^{f.dim}")
    x = as_point(x0, space.dim)

    def record(n: int, point: Point) -> IterationStep:
        return IterationStep(
            n=n,
            x=tuple(float(c) for c in point),
            dist_to_u=repeated_distance(space, u, point) if u is not None else None,
            bound=tracker.value if tracker is not None else None,
        )

    steps: List[IterationStep] = [record(0, x)]
    converged = fixed_point_residual(space, f, x) < stop.dist_tol
    calm = 0
    n = 0
    while not converged and n < stop.max_steps:
        x_next = advance(n, x)
        magnitude = float(np.max(np.abs(x_next))) if np.all(np.isfinite(x_next)) else math.inf
        if magnitude > ITERATION.DIVERGENCE_GUARD:
            partial = IterationTrace(method, f.name, tuple(steps), converged=False)
            logger.error(f"{method} run of '{f.name}' diverged at step {n + 1}")
            raise DivergenceError(n + 1, magnitude, partial)
        if tracker is not None and alpha is not None:
            tracker.advance(alpha(n))
        steps.append(record(n + 1, x_next))

        calm = calm + 1 if repeated_distance(space, x_next, x) < stop.dist_tol else 0
        x = x_next
        n += 1
        converged = calm >= stop.cauchy_window

    residual = fixed_point_residual(space, f, x)
    trace = IterationTrace(
        method=method,
        map_name=f.name,
        steps=tuple(steps),
        converged=converged,
        limit=tuple(float(c) for c in x) if converged else None,
        residual=residual,
    )
    logger.info(
        f"{method} run of '{f.name}': {len(steps) - 1} steps, converged={converged}, "
        f"residual={residual:.3e}"
    )
    return trace


def picard_run(
    space: AMetricSpace, f: SelfMap, x0, stop: StopRule = StopRule(), u=None
) -> IterationTrace:
    """
    Picard iteration x_{n+1} = f(x_n)

    Raises:
        DivergenceError: When an iterate exceeds the overflow guard; the
            partial trace is attached
    """
    return _iterate(
        space, f, x0, stop, advance=lambda n, x: f.apply(x), method="picard", u=_resolve_u(f, u)
    )


def mann_step(W: ConvexStructure, f: SelfMap, x, weights: WeightsLike) -> Point:
    """x_{n+1} = W(x, ..., x, f x; alpha_1, ..., alpha_t)"""
    point = as_point(x, W.dim)
    tuple_ = [point] * (W.arity - 1) + [f.apply(point)]
    return combine(W, tuple_, weights)


def mann_run(
    space: AMetricSpace,
    W: ConvexStructure,
    f: SelfMap,
    x0,
    schedule: Schedule,
    stop: StopRule = StopRule(),
    delta: Optional[float] = None,
    u=None,
) -> IterationTrace:
    """
    Mann iteration with per-step weights from ``schedule``

    The theoretical bound is co-computed when both delta and a fixed point
    (``u`` or the map's known fixed point) are available.
    """
    if not (schedule.arity == W.arity == space.arity):
        raise InputShapeError(
            f"schedule and structure of arity {space.arity}",
            f"schedule t={schedule.arity}, structure t={W.arity}",
        )
    target = _resolve_u(f, u)
    tracker = None
    if delta is not None and target is not None:
        tracker = BoundTracker(delta, repeated_distance(space, target, as_point(x0, space.dim)))
    if not schedule.diverges:
        logger.warning(f"Schedule '{schedule.description}' has a convergent series of weights")
    return _iterate(
        space,
        f,
        x0,
        stop,
        advance=lambda n, x: mann_step(W, f, x, schedule.weights(n)),
        method="mann",
        u=target,
        tracker=tracker,
        alpha=schedule.alpha_t,
    )


# ============================================================================
# Convergence detection
# ============================================================================


def detect_convergence(
    trace: IterationTrace,
    space: AMetricSpace,
    tol: float = ITERATION.DIST_TOL,
    window: int = ITERATION.CAUCHY_WINDOW,
) -> ConvergenceResult:
    """
    Converged when the last ``window`` consecutive repeated distances are below tol

    A single-row trace keeps the runner's own flag; other traces shorter
    than ``window`` moves never count as converged.
    """
    if len(trace.steps) == 0:
        raise InputShapeError("non-empty trace", "empty trace")
    iterates = trace.iterates
    if len(iterates) == 1:
        return ConvergenceResult(trace.converged, iterates[0] if trace.converged else None)
    if len(iterates) < window + 1:
        return ConvergenceResult(False, None)
    tail = iterates[-(window + 1):]
    moves = [repeated_distance(space, b, a) for a, b in zip(tail[:-1], tail[1:])]
    converged = all(move < tol for move in moves)
    return ConvergenceResult(converged, iterates[-1] if converged else None)


def is_cauchy_tail(
    trace: IterationTrace,
    space: AMetricSpace,
    tol: float = ITERATION.DIST_TOL,
    window: int = ITERATION.CAUCHY_WINDOW,
) -> bool:
    """Every pair of the last ``window`` iterates is within tol; False on shorter traces"""
    if len(trace.iterates) < window:
        return False
    tail = trace.iterates[-window:]
    return all(
        repeated_distance(space, a, b) < tol
        for i, a in enumerate(tail)
        for j, b in enumerate(tail)
        if i != j
    )


@dataclass(frozen=True)
class StepCheck:
    """Outcome of a per-step inequality check; falsy on failure"""

    passed: bool
    steps_checked: int
    witness_step: Optional[int] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "steps_checked": self.steps_checked,
            "witness_step": self.witness_step,
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


def first_failure(lhs: Sequence[float], rhs: Sequence[float], tol: float, rtol: float) -> StepCheck:
    """Scan lhs <= rhs step by step and report the first violation"""
    failing = np.flatnonzero(exceeds(np.asarray(lhs), np.asarray(rhs), tol, rtol))
    if len(failing) == 0:
        return StepCheck(passed=True, steps_checked=len(lhs))
    row = int(failing[0])
    return StepCheck(
        passed=False,
        steps_checked=len(lhs),
        witness_step=row,
        lhs=float(lhs[row]),
        rhs=float(rhs[row]),
    )


def check_mann_inequality(
    space: AMetricSpace,
    f: SelfMap,
    trace: IterationTrace,
    schedule: Schedule,
    anchors: Sequence,
    tol: float = TOLERANCES.ABS,
    rtol: float = TOLERANCES.REL,
) -> StepCheck:
    """
    Per-step consequence of convexity for a Mann trace

        A(x_{n+1}, u_1, ..., u_{t-1}) <= (1 - alpha_t^n) A(x_n, u...) + alpha_t^n A(f x_n, u...)
    """
    t = space.arity
    us = [as_point(p, space.dim) for p in anchors]
    if len(us) != t - 1:
        raise InputShapeError(f"{t - 1} anchor points", f"{len(us)} points")
    iterates = trace.iterates
    lhs, rhs = [], []
    for n in range(len(iterates) - 1):
        alpha = schedule.alpha_t(n)
        x_n, x_next = iterates[n], iterates[n + 1]
        lhs.append(evaluate(space, [x_next] + us))
        rhs.append(
            (1.0 - alpha) * evaluate(space, [x_n] + us)
            + alpha * evaluate(space, [f.apply(x_n)] + us)
        )
    return first_failure(lhs, rhs, tol, rtol)
