"""
Convex structures on A-metric spaces

A convex structure W maps t points and t weights to a point and must satisfy

    A(u_1, ..., u_{t-1}, W(x; a)) <= sum_i a_i A(u_1, ..., u_{t-1}, x_i)

The coordinatewise weighted mean is the reference instance; check_convexity
verifies the inequality by sampling.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

from .ametric_core import AMetricSpace, Point, as_point, as_tuple
from .constants import SAMPLING, TOLERANCES
from .exceptions import InputShapeError, InvalidArityError, InvalidWeightsError
from .sampling import Sampler, iter_chunks
from .tolerance import exceeds

logger = logging.getLogger(__name__)

BatchCombiner = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class WeightVector:
    """
    Weights a_1, ..., a_t in [0, 1] summing to 1

    Sums within 1e-12 of 1 are kept bit-for-bit; sums within 1e-9 are
    renormalized; anything further off is rejected.
    """

    weights: Tuple[float, ...]

    def __post_init__(self):
        values = np.asarray(self.weights, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise InvalidWeightsError(self.weights, "expected a non-empty flat sequence")
        if not np.all(np.isfinite(values)):
            raise InvalidWeightsError(self.weights, "non-finite entry")
        slack = TOLERANCES.WEIGHT_SUM
        if np.any(values < -slack) or np.any(values > 1.0 + slack):
            raise InvalidWeightsError(self.weights, "entries must lie in [0, 1]")
        values = np.clip(values, 0.0, 1.0)

        deviation = abs(float(values.sum()) - 1.0)
        if deviation > TOLERANCES.WEIGHT_REJECT:
            raise InvalidWeightsError(self.weights, f"sum deviates from 1 by {deviation:.3e}")
        if deviation > TOLERANCES.WEIGHT_SUM:
            values = values / values.sum()
        object.__setattr__(self, "weights", tuple(float(v) for v in values))

    @property
    def arity(self) -> int:
        return len(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @classmethod
    def basis(cls, t: int, index: int) -> "WeightVector":
        """Unit weight on slot ``index``"""
        values = [0.0] * t
        values[index] = 1.0
        return cls(tuple(values))

    @classmethod
    def uniform(cls, t: int) -> "WeightVector":
        return cls(tuple([1.0 / t] * t))


WeightsLike = Union[WeightVector, Sequence[float]]


def as_weights(weights: WeightsLike) -> WeightVector:
    return weights if isinstance(weights, WeightVector) else WeightVector(tuple(weights))


@dataclass(frozen=True, eq=False)
class ConvexStructure:
    """
    Convex structure W: X^t x I^t -> X

    The combiner works on batches: tuples of shape (n, t, d) and weights of
    shape (n, t) give points of shape (n, d).
    """

    arity: int
    dim: int
    combiner: BatchCombiner
    name: str = "custom"

    def __post_init__(self):
        if self.arity < 2:
            raise InvalidArityError(self.arity, "convex structures need t >= 2")

    def batch_combine(self, tuples: np.ndarray, weights: np.ndarray) -> np.ndarray:
        if tuples.ndim != 3 or tuples.shape[1:] != (self.arity, self.dim):
            raise InputShapeError(
                f"batch of shape (n, {self.arity}, {self.dim})", f"shape {tuples.shape}"
            )
        if weights.shape != tuples.shape[:2]:
            raise InputShapeError(f"weights of shape {tuples.shape[:2]}", f"shape {weights.shape}")
        return np.asarray(self.combiner(tuples, weights), dtype=float)

    @classmethod
    def from_function(
        cls,
        func: Callable[[Tuple[Point, ...], Tuple[float, ...]], Point],
        arity: int,
        dim: int,
        name: str = "custom",
    ) -> "ConvexStructure":
        """Wrap a scalar W(points, weights) into a batched structure"""

        def combiner(tuples: np.ndarray, weights: np.ndarray) -> np.ndarray:
            return np.array(
                [
                    np.asarray(func(tuple(row), tuple(w)), dtype=float)
                    for row, w in zip(tuples, weights)
                ]
            ).reshape(len(tuples), dim)

        return cls(arity=arity, dim=dim, combiner=combiner, name=name)


def combine(W: ConvexStructure, points: Sequence, weights: WeightsLike) -> Point:
    """
    W(x_1, ..., x_t; a_1, ..., a_t)

    Raises:
        InputShapeError: If the tuple or weights do not match W
        InvalidWeightsError: If the weights are not a probability vector
    """
    vector = as_weights(weights)
    if vector.arity != W.arity:
        raise InputShapeError(f"{W.arity} weights", f"{vector.arity} weights")
    array = as_tuple(points, W.arity, W.dim)
    result = W.batch_combine(array[None, ...], vector.as_array()[None, :])[0]
    return as_point(result, W.dim)


def weighted_mean_structure(t: int, d: int = 1) -> ConvexStructure:
    """Coordinatewise affine combination sum_i a_i x_i"""

    def combiner(tuples: np.ndarray, weights: np.ndarray) -> np.ndarray:
        # Slot by slot, no fused multiply-add: t=2 matches (1-a)x + a y bit for bit
        result = weights[:, 0, None] * tuples[:, 0, :]
        for i in range(1, t):
            result = result + weights[:, i, None] * tuples[:, i, :]
        return result

    return ConvexStructure(arity=t, dim=d, combiner=combiner, name="weighted_mean")


def first_slot_structure(t: int, d: int = 1) -> ConvexStructure:
    """W(x; a) = x_1 regardless of the weights; not a convex structure"""
    return ConvexStructure(
        arity=t, dim=d, combiner=lambda tuples, weights: tuples[:, 0, :].copy(), name="first_slot"
    )


STRUCTURES = {"weighted_mean": weighted_mean_structure, "first_slot": first_slot_structure}


# ============================================================================
# Convexity checker
# ============================================================================


@dataclass(frozen=True)
class ConvexityViolation:
    """A sampled instance where the convexity inequality fails"""

    sample_index: int
    u: Tuple[Tuple[float, ...], ...]
    x: Tuple[Tuple[float, ...], ...]
    weights: Tuple[float, ...]
    lhs: float
    rhs: float

    def to_dict(self) -> dict:
        return {
            "index": self.sample_index,
            "u": [list(p) for p in self.u],
            "x": [list(p) for p in self.x],
            "weights": list(self.weights),
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of check_convexity"""

    space_name: str
    structure_name: str
    samples_checked: int
    violations: Tuple[ConvexityViolation, ...] = ()

    @property
    def passed(self) -> bool:
        return len(self.violations) == 0

    def to_dict(self) -> dict:
        return {
            "space": self.space_name,
            "structure": self.structure_name,
            "samples_checked": self.samples_checked,
            "passed": self.passed,
            "violations": [v.to_dict() for v in self.violations],
        }


def corner_cases(
    u0: np.ndarray, x0: np.ndarray, t: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Deterministic adversarial instances built from one sampled (u, x)

    Covers basis weights, u coinciding with each x_i, coincident x's and
    fully coincident instances.

    Returns:
        (u, x, weights) arrays of shapes (m, t-1, d), (m, t, d), (m, t)
    """
    us: List[np.ndarray] = []
    xs: List[np.ndarray] = []
    ws: List[np.ndarray] = []
    eye = np.eye(t)
    uniform = np.full(t, 1.0 / t)
    for i in range(t):
        # Basis weights
        us.append(u0)
        xs.append(x0)
        ws.append(eye[i])
        # u sitting on x_i with the mass on x_i
        us.append(np.repeat(x0[i : i + 1], t - 1, axis=0))
        xs.append(x0)
        ws.append(eye[i])
    coincident = np.repeat(x0[:1], t, axis=0)
    us.append(u0)
    xs.append(coincident)
    ws.append(uniform)
    us.append(coincident[: t - 1])
    xs.append(coincident)
    ws.append(uniform)
    us.append(x0[: t - 1])
    xs.append(x0)
    ws.append(uniform)
    return np.stack(us), np.stack(xs), np.stack(ws)


def _with_last(us: np.ndarray, last: np.ndarray) -> np.ndarray:
    return np.concatenate([us, last[:, None, :]], axis=1)


def check_convexity(
    space: AMetricSpace,
    W: ConvexStructure,
    sampler: Sampler,
    n_samples: int = SAMPLING.N_SAMPLES,
    tol: float = TOLERANCES.ABS,
    rtol: float = TOLERANCES.REL,
) -> ConvexityReport:
    """
    Check the convexity inequality on corner cases followed by random draws

    Args:
        space: A-metric space
        W: Convex structure of the same arity and dimension
        sampler: Seeded sampler
        n_samples: Number of random instances (corner cases come on top)
        tol: Absolute tolerance
        rtol: Relative tolerance

    Returns:
        ConvexityReport listing every instance with lhs > rhs + tol
    """
    if space.arity != W.arity or space.dim != W.dim:
        raise InputShapeError(
            f"structure with t={space.arity}, d={space.dim}", f"t={W.arity}, d={W.dim}"
        )
    if n_samples < 1:
        raise InputShapeError("n_samples >= 1", str(n_samples))
    t = space.arity

    u_rand = sampler.tuples(n_samples, t - 1, stream=SAMPLING.STREAM_TUPLES)
    x_rand = sampler.tuples(n_samples, t, stream=SAMPLING.STREAM_EXTRA)
    w_rand = sampler.weights(n_samples, t, stream=SAMPLING.STREAM_WEIGHTS)
    n_rand = min(len(u_rand), len(x_rand), len(w_rand))

    u_corner, x_corner, w_corner = corner_cases(u_rand[0], x_rand[0], t)
    us = np.concatenate([u_corner, u_rand[:n_rand]])
    xs = np.concatenate([x_corner, x_rand[:n_rand]])
    ws = np.concatenate([w_corner, w_rand[:n_rand]])
    n = len(us)

    logger.info(f"Checking convexity of '{W.name}' on '{space.name}' with {n} instances")
    violations: List[ConvexityViolation] = []

    for chunk in iter_chunks(n):
        u, x, w = us[chunk], xs[chunk], ws[chunk]
        combined = W.batch_combine(x, w)
        lhs = space.batch(_with_last(u, combined))
        rhs = sum(w[:, i] * space.batch(_with_last(u, x[:, i, :])) for i in range(t))
        for row in np.flatnonzero(exceeds(lhs, rhs, tol, rtol)):
            violations.append(
                ConvexityViolation(
                    sample_index=chunk.start + int(row),
                    u=tuple(tuple(map(float, p)) for p in u[row]),
                    x=tuple(tuple(map(float, p)) for p in x[row]),
                    weights=tuple(map(float, w[row])),
                    lhs=float(lhs[row]),
                    rhs=float(rhs[row]),
                )
            )

    report = ConvexityReport(
        space_name=space.name,
        structure_name=W.name,
        samples_checked=n,
        violations=tuple(violations),
    )
    if report.passed:
        logger.info(f"'{W.name}' is a convex structure on '{space.name}' for all samples")
    else:
        logger.warning(f"'{W.name}' fails convexity on {len(violations)} of {n} instances")
    return report


def is_in_convex_box(
    W: ConvexStructure, points: Sequence, weights: WeightsLike, low: float, high: float
) -> bool:
    """Membership of W(points; weights) in the box [low, high]^d"""
    result = combine(W, points, weights)
    return bool(np.all(result >= low) and np.all(result <= high))
