"""
Stability of the Mann iteration

An approximate orbit y_0, y_1, ... of the Mann operator
g(f, y) = W(y, ..., y, f y; alpha^n) has per-step defects

    eps_n = A(y_{n+1}, ..., y_{n+1}, g(f, y_n))

and the iteration is f-stable when y_n -> u exactly when eps_n -> 0.
This module generates perturbed orbits, evaluates both limits numerically,
checks the per-step recursions behind each direction and runs the
extremal sequence u_{n+1} = delta u_n + eps_n of the Berinde lemma.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .ametric_core import AMetricSpace, Point, as_point, repeated_distance
from .constants import ITERATION, SAMPLING, STABILITY
from .contraction import classify_az
from .convexity import ConvexStructure, WeightsLike
from .exceptions import DivergenceError, InputShapeError, InvalidModulusError, InvalidParameterError
from .iteration import BoundTracker, StepCheck, StopRule, first_failure, mann_run, mann_step
from .maps import SelfMap
from .sampling import PointSampler
from .schedules import Schedule
from .tolerance import tail_limit_is_zero

logger = logging.getLogger(__name__)

PerturbationGenerator = Callable[[int], Sequence[float]]


class PerturbationKind(Enum):
    NONE = "none"
    DECAYING_GEOMETRIC = "decaying_geometric"
    DECAYING_HARMONIC = "decaying_harmonic"
    CONSTANT = "constant"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class Perturbation:
    """
    Additive displacement p_n applied after each Mann step

    Built-in kinds displace along (1, ..., 1)/d, so the L1 norm of p_n is
    its magnitude.
    """

    kind: PerturbationKind
    dim: int
    generator: PerturbationGenerator
    description: str = ""

    def displacement(self, n: int) -> Point:
        return as_point(self.generator(n), self.dim)


def _direction(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / dim)


def no_perturbation(dim: int = 1) -> Perturbation:
    return Perturbation(PerturbationKind.NONE, dim, lambda n: np.zeros(dim), "none")


def geometric_perturbation(r: float, dim: int = 1, scale: float = 1.0) -> Perturbation:
    """p_n = scale * r^n"""
    if not 0.0 <= r < 1.0:
        raise InvalidParameterError("r", r, "need 0 <= r < 1")
    direction = _direction(dim)
    return Perturbation(
        PerturbationKind.DECAYING_GEOMETRIC,
        dim,
        lambda n: scale * r**n * direction,
        f"{scale} * {r}^n",
    )


def harmonic_perturbation(dim: int = 1, scale: float = 1.0) -> Perturbation:
    """p_n = scale / (n + 1)"""
    direction = _direction(dim)
    return Perturbation(
        PerturbationKind.DECAYING_HARMONIC,
        dim,
        lambda n: scale / (n + 1.0) * direction,
        f"{scale} / (n+1)",
    )


def constant_perturbation(m: float, dim: int = 1) -> Perturbation:
    if m < 0.0:
        raise InvalidParameterError("m", m, "need m >= 0")
    direction = _direction(dim)
    return Perturbation(PerturbationKind.CONSTANT, dim, lambda n: m * direction, f"constant {m}")


def custom_perturbation(generator: PerturbationGenerator, dim: int = 1) -> Perturbation:
    return Perturbation(PerturbationKind.CUSTOM, dim, generator, "custom")


def build_perturbation(kind: str, params: dict, dim: int) -> Perturbation:
    """Build a perturbation from its config kind and parameters"""
    scale = float(params.get("scale", 1.0))
    if kind == PerturbationKind.NONE.value:
        return no_perturbation(dim)
    if kind == PerturbationKind.DECAYING_GEOMETRIC.value:
        return geometric_perturbation(float(params.get("r", 0.5)), dim, scale)
    if kind == PerturbationKind.DECAYING_HARMONIC.value:
        return harmonic_perturbation(dim, scale)
    if kind == PerturbationKind.CONSTANT.value:
        return constant_perturbation(float(params.get("m", 1.0)), dim)
    if kind == PerturbationKind.CUSTOM.value:
        # Config tables list p_0, p_1, ...; zero displacement after the table ends
        table = [as_point(row, dim) for row in params.get("displacements", [])]
        if not table:
            raise InvalidParameterError("displacements", table, "custom perturbation needs a table")
        return custom_perturbation(lambda n: table[n] if n < len(table) else np.zeros(dim), dim)
    raise InvalidParameterError("perturbation.kind", kind, "unknown perturbation kind")


# ============================================================================
# Defects and perturbed orbits
# ============================================================================


def mann_operator(W: ConvexStructure, f: SelfMap, y, weights: WeightsLike) -> Point:
    """g(f, y) = W(y, ..., y, f y; alpha_1, ..., alpha_t)"""
    return mann_step(W, f, y, weights)


def epsilon_sequence(
    space: AMetricSpace,
    W: ConvexStructure,
    f: SelfMap,
    schedule: Schedule,
    y_seq: Sequence,
) -> List[float]:
    """eps_0, ..., eps_{N-1} for an arbitrary sequence y_0, ..., y_N"""
    if len(y_seq) < 2:
        raise InputShapeError("sequence of at least 2 points", f"{len(y_seq)} points")
    ys = [as_point(y, space.dim) for y in y_seq]
    return [
        repeated_distance(space, ys[n + 1], mann_operator(W, f, ys[n], schedule.weights(n)))
        for n in range(len(ys) - 1)
    ]


class StabilityVerdict(Enum):
    CONSISTENT_STABLE = "consistent_stable"
    CONSISTENT_UNSTABLE_INPUT = "consistent_unstable_input"
    VIOLATION = "violation"


@dataclass(frozen=True)
class StabilityStep:
    """
    One orbit point

    ``eps`` is eps_n (undefined for the final point); ``dist_to_u`` is
    A(y_n, ..., y_n, u) and ``dist_from_u`` is A(u, ..., u, y_n).
    """

    n: int
    y: Tuple[float, ...]
    eps: Optional[float]
    dist_to_u: float
    dist_from_u: float


@dataclass(frozen=True)
class StabilityReport:
    map_name: str
    u: Tuple[float, ...]
    steps: Tuple[StabilityStep, ...]
    eps_limit_zero: bool
    y_converges_to_u: bool
    verdict: StabilityVerdict
    warnings: Tuple[str, ...] = field(default_factory=tuple)
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def epsilons(self) -> List[float]:
        return [step.eps for step in self.steps if step.eps is not None]

    @property
    def distances(self) -> List[float]:
        return [step.dist_to_u for step in self.steps]

    def summary(self) -> dict:
        return {
            "map": self.map_name,
            "u": list(self.u),
            "steps": len(self.steps) - 1,
            "eps_limit_zero": self.eps_limit_zero,
            "y_converges_to_u": self.y_converges_to_u,
            "verdict": self.verdict.value,
            "warnings": list(self.warnings),
            "notes": list(self.notes),
        }


def _verdict(eps_zero: bool, converges: bool) -> StabilityVerdict:
    if eps_zero != converges:
        return StabilityVerdict.VIOLATION
    if eps_zero:
        return StabilityVerdict.CONSISTENT_STABLE
    return StabilityVerdict.CONSISTENT_UNSTABLE_INPUT


def _resolve_fixed_point(
    space: AMetricSpace, W: ConvexStructure, f: SelfMap, x0, schedule: Schedule, u
) -> Point:
    if u is not None:
        return as_point(u, space.dim)
    if f.fixed_point is not None:
        return f.fixed_point
    trace = mann_run(space, W, f, x0, schedule, StopRule())
    if not trace.limit_is_fixed_point():
        raise InvalidParameterError(
            "u",
            None,
            f"no known fixed point for '{f.name}' and the exact Mann run did not reach one",
        )
    logger.info(f"Using the Mann limit {trace.limit} as fixed point of '{f.name}'")
    return np.asarray(trace.limit, dtype=float)


def perturbed_run(
    space: AMetricSpace,
    W: ConvexStructure,
    f: SelfMap,
    x0,
    schedule: Schedule,
    perturbation: Perturbation,
    n_steps: int = STABILITY.N_STEPS,
    u=None,
    seed: int = SAMPLING.SEED,
    n_samples: int = SAMPLING.N_SAMPLES,
) -> StabilityReport:
    """
    Run y_{n+1} = g(f, y_n) + p_n and compare both limits

    A violation verdict is re-examined: if the AZ hypothesis fails on a
    fresh sample (``seed``, ``n_samples``) or the schedule has no lower
    bound, the verdict is downgraded to consistent_unstable_input with a
    note.

    Raises:
        DivergenceError: When the orbit leaves the finite range; carries the
            partial StabilityReport of the steps recorded so far
    """
    if n_steps < 1:
        raise InvalidParameterError("n_steps", n_steps, "need >= 1")
    if perturbation.dim != space.dim:
        raise InputShapeError(f"perturbation on R^{space.dim}", f"R^{perturbation.dim}")
    target = _resolve_fixed_point(space, W, f, x0, schedule, u)

    warnings: List[str] = []
    if schedule.lower_bound is None:
        message = f"schedule '{schedule.description}' has no positive lower bound on alpha_t"
        logger.warning(f"Stability hypothesis not met: {message}")
        warnings.append(message)

    def record(n: int, y: Point, eps: Optional[float]) -> StabilityStep:
        return StabilityStep(
            n=n,
            y=tuple(float(c) for c in y),
            eps=eps,
            dist_to_u=repeated_distance(space, y, target),
            dist_from_u=repeated_distance(space, target, y),
        )

    def assess(steps: List[StabilityStep], notes: List[str]) -> StabilityReport:
        return _assess(
            space, f, schedule, target, steps, warnings, notes, seed=seed, n_samples=n_samples
        )

    y = as_point(x0, space.dim)
    steps: List[StabilityStep] = []
    for n in range(n_steps):
        g = mann_operator(W, f, y, schedule.weights(n))
        y_next = g + perturbation.displacement(n)
        magnitude = float(np.max(np.abs(y_next))) if np.all(np.isfinite(y_next)) else math.inf
        if magnitude > ITERATION.DIVERGENCE_GUARD:
            logger.error(f"Perturbed orbit of '{f.name}' diverged at step {n + 1}")
            steps.append(record(n, y, None))
            partial = assess(steps, [f"orbit diverged at step {n + 1} (|y| = {magnitude:.3e})"])
            raise DivergenceError(n + 1, magnitude, partial)
        steps.append(record(n, y, repeated_distance(space, y_next, g)))
        y = y_next
    steps.append(record(n_steps, y, None))

    report = assess(steps, [])
    logger.info(
        f"Perturbed run of '{f.name}' ({perturbation.description}): eps->0 "
        f"{report.eps_limit_zero}, y->u {report.y_converges_to_u}, "
        f"verdict {report.verdict.value}"
    )
    return report


def _assess(
    space: AMetricSpace,
    f: SelfMap,
    schedule: Schedule,
    target: Point,
    steps: List[StabilityStep],
    warnings: List[str],
    notes: List[str],
    seed: int,
    n_samples: int,
) -> StabilityReport:
    """Limits and verdict of the recorded steps; the last step carries no eps"""
    eps_zero = tail_limit_is_zero([s.eps for s in steps[:-1] if s.eps is not None])
    converges = tail_limit_is_zero([s.dist_to_u for s in steps])
    verdict = _verdict(eps_zero, converges)

    notes = list(notes)
    if verdict is StabilityVerdict.VIOLATION:
        hypotheses: List[str] = []
        sampler = PointSampler(dim=space.dim, seed=seed)
        az = classify_az(space, f, None, sampler, n_samples)
        if not az.is_az:
            hypotheses.append(f"'{f.name}' is not AZ on the sample; stability hypothesis not met")
        if schedule.lower_bound is None:
            hypotheses.append("schedule lacks a lower bound; stability hypothesis not met")
        if hypotheses:
            verdict = StabilityVerdict.CONSISTENT_UNSTABLE_INPUT
        notes.extend(hypotheses)

    return StabilityReport(
        map_name=f.name,
        u=tuple(float(c) for c in target),
        steps=tuple(steps),
        eps_limit_zero=eps_zero,
        y_converges_to_u=converges,
        verdict=verdict,
        warnings=tuple(warnings),
        notes=tuple(notes),
    )


# ============================================================================
# Per-step recursions
# ============================================================================


def _factors(delta: float, schedule: Schedule, n_steps: int) -> np.ndarray:
    if not 0.0 <= delta < 1.0:
        raise InvalidModulusError(delta)
    return np.array([BoundTracker.factor(delta, schedule.alpha_t(n)) for n in range(n_steps)])


def forward_bound_check(
    report: StabilityReport, delta: float, schedule: Schedule, t: int, tol: float = 1e-9
) -> StepCheck:
    """
    A(y_{n+1}, ..., u) <= [1 - (1 - delta) alpha_t^n] A(y_n, ..., u) + (t - 1) eps_n

    Returns a falsy StepCheck with the first failing step as witness.
    """
    steps = report.steps
    n = len(steps) - 1
    factors = _factors(delta, schedule, n)
    lhs = [steps[k + 1].dist_to_u for k in range(n)]
    rhs = [factors[k] * steps[k].dist_to_u + (t - 1) * steps[k].eps for k in range(n)]
    return first_failure(lhs, rhs, tol, tol)


def converse_bound_check(
    report: StabilityReport, delta: float, schedule: Schedule, t: int, tol: float = 1e-9
) -> StepCheck:
    """eps_n <= (t - 1) A(y_{n+1}, ..., u) + [1 - (1 - delta) alpha_t^n] A(u, ..., u, y_n)"""
    steps = report.steps
    n = len(steps) - 1
    factors = _factors(delta, schedule, n)
    lhs = [steps[k].eps for k in range(n)]
    rhs = [(t - 1) * steps[k + 1].dist_to_u + factors[k] * steps[k].dist_from_u for k in range(n)]
    return first_failure(lhs, rhs, tol, tol)


# ============================================================================
# Berinde lemma
# ============================================================================

EpsilonSource = Union[Callable[[int], float], Sequence[float]]


@dataclass(frozen=True)
class BerindeInput:
    """u_{n+1} <= delta u_n + eps_n with eps_n -> 0"""

    delta: float
    eps: EpsilonSource
    u0: float

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise InvalidModulusError(self.delta)
        if self.u0 < 0.0:
            raise InvalidParameterError("u0", self.u0, "need u0 >= 0")

    def eps_at(self, n: int) -> float:
        value = float(self.eps(n)) if callable(self.eps) else float(self.eps[n])
        if value < 0.0:
            raise InvalidParameterError("eps", value, f"negative at step {n}")
        return value


@dataclass(frozen=True)
class LimitCheck:
    """Outcome of berinde_limit_check; falsy when the limit is not zero"""

    passed: bool
    n_steps: int
    final: float
    criterion: Optional[str] = None

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_steps": self.n_steps,
            "final": self.final,
            "criterion": self.criterion,
        }


def berinde_limit_check(
    data: BerindeInput, n_steps: int, tol: float = STABILITY.LIMIT_TOL
) -> LimitCheck:
    """
    Run the extremal sequence u_{n+1} = delta u_n + eps_n and test u_n -> 0

    The limit counts as zero when u_N < tol, or when the second half of the
    horizon both respects the envelope delta^{N-m} u_m + max eps_k / (1 - delta)
    and keeps shrinking (u_N <= 0.75 u_m, m = N/2).
    """
    if n_steps < 2:
        raise InvalidParameterError("n_steps", n_steps, "need >= 2")
    if not callable(data.eps) and len(data.eps) < n_steps:
        raise InputShapeError(f"{n_steps} eps values", f"{len(data.eps)} values")

    middle = n_steps // 2
    value, u_middle, eps_max = data.u0, data.u0, 0.0
    for n in range(n_steps):
        if n == middle:
            u_middle = value
        eps = data.eps_at(n)
        if n >= middle:
            eps_max = max(eps_max, eps)
        value = data.delta * value + eps

    if value < tol:
        result = LimitCheck(True, n_steps, value, "tail")
    else:
        envelope = data.delta ** (n_steps - middle) * u_middle + eps_max / (1.0 - data.delta)
        shrinking = value <= STABILITY.ENVELOPE_SHRINK * u_middle
        within = value <= envelope + STABILITY.ENVELOPE_SLACK
        passed = within and shrinking
        result = LimitCheck(passed, n_steps, value, "envelope" if passed else None)
    logger.info(
        f"Berinde sequence at delta={data.delta}: u_{n_steps} = {value:.3e}, "
        f"limit zero: {result.passed}"
    )
    return result
