"""
A-metric spaces

Defines the A-metric space value object, the pairwise-sum lift of a base
metric (the classical example space is the lift of the L1 metric) and a
sampling checker for axioms A1-A3 and the two derived lemmas.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants import SAMPLING, SPACE_LIMITS, TOLERANCES
from .exceptions import InputShapeError, InvalidArityError
from .sampling import Sampler, iter_chunks
from .tolerance import exceeds

logger = logging.getLogger(__name__)

Point = np.ndarray
BatchEvaluator = Callable[[np.ndarray], np.ndarray]
PairEvaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]

AXIOM_IDS: Tuple[str, ...] = ("A1", "A2", "A3", "L2", "L3a", "L3b")


# ============================================================================
# Points and tuples
# ============================================================================


def as_point(coords, dim: int) -> Point:
    """
    Validate and convert coordinates to a point of the carrier

    Args:
        coords: Scalar (when dim == 1) or sequence of ``dim`` reals
        dim: Carrier dimension

    Returns:
        Float array of shape (dim,)

    Raises:
        InputShapeError: On wrong dimension or non-finite coordinates
    """
    point = np.atleast_1d(np.asarray(coords, dtype=float))
    if point.shape != (dim,):
        raise InputShapeError(f"point of dimension {dim}", f"shape {point.shape}")
    if not np.all(np.isfinite(point)):
        raise InputShapeError("finite coordinates", f"{point.tolist()}")
    return point


def as_tuple(points, arity: int, dim: int) -> np.ndarray:
    """Validate a t-tuple of points and return it as an array of shape (t, d)"""
    array = np.asarray(points, dtype=float)
    if dim == 1 and array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.shape != (arity, dim):
        raise InputShapeError(f"{arity} points of dimension {dim}", f"shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InputShapeError("finite coordinates", f"{array.tolist()}")
    return array


def repeat_tuple(xs: np.ndarray, ys: np.ndarray, arity: int) -> np.ndarray:
    """Build the batch of tuples (x, ..., x, y) with x repeated arity - 1 times"""
    head = np.repeat(xs[:, None, :], arity - 1, axis=1)
    return np.concatenate([head, ys[:, None, :]], axis=1)


# ============================================================================
# Base metrics
# ============================================================================


@dataclass(frozen=True, eq=False)
class BaseMetric:
    """Ordinary metric d(x, y) on R^dim, evaluated on broadcastable arrays (..., dim)"""

    name: str
    dim: int
    evaluator: PairEvaluator

    def __call__(self, x, y) -> float:
        return float(self.evaluator(as_point(x, self.dim), as_point(y, self.dim)))


def l1_metric(dim: int = 1) -> BaseMetric:
    return BaseMetric("l1", dim, lambda x, y: np.abs(x - y).sum(axis=-1))


def l2_metric(dim: int = 1) -> BaseMetric:
    return BaseMetric("l2", dim, lambda x, y: np.sqrt(((x - y) ** 2).sum(axis=-1)))


def linf_metric(dim: int = 1) -> BaseMetric:
    return BaseMetric("linf", dim, lambda x, y: np.abs(x - y).max(axis=-1))


def discrete_metric(dim: int = 1) -> BaseMetric:
    return BaseMetric("discrete", dim, lambda x, y: np.any(x != y, axis=-1).astype(float))


BASE_METRICS: Dict[str, Callable[[int], BaseMetric]] = {
    "l1": l1_metric,
    "l2": l2_metric,
    "linf": linf_metric,
    "discrete": discrete_metric,
}


# ============================================================================
# A-metric spaces
# ============================================================================


@dataclass(frozen=True, eq=False)
class AMetricSpace:
    """
    A-metric space on R^dim

    The evaluator maps a batch of t-tuples, shape (n, t, d), to the n values
    of A. Lifted spaces keep a reference to their base metric.
    """

    arity: int
    dim: int
    evaluator: BatchEvaluator
    name: str = "custom"
    base: Optional[BaseMetric] = field(default=None)

    def __post_init__(self):
        if self.arity < SPACE_LIMITS.MIN_ARITY:
            raise InvalidArityError(self.arity, f"must be >= {SPACE_LIMITS.MIN_ARITY}")
        if self.arity > SPACE_LIMITS.MAX_ARITY:
            raise InvalidArityError(self.arity, f"must be <= {SPACE_LIMITS.MAX_ARITY}")
        if self.dim < SPACE_LIMITS.MIN_DIM:
            raise InputShapeError("dimension >= 1", f"dim={self.dim}")

    @property
    def permutation_symmetric(self) -> bool:
        """Pair-sum lifts are invariant under any reordering of the tuple"""
        return self.base is not None

    def batch(self, tuples: np.ndarray) -> np.ndarray:
        """Evaluate A on a batch of tuples of shape (n, arity, dim)"""
        if tuples.ndim != 3 or tuples.shape[1:] != (self.arity, self.dim):
            raise InputShapeError(
                f"batch of shape (n, {self.arity}, {self.dim})", f"shape {tuples.shape}"
            )
        return np.asarray(self.evaluator(tuples), dtype=float)

    @classmethod
    def from_function(
        cls, func: Callable[[Tuple[Point, ...]], float], arity: int, dim: int, name: str = "custom"
    ) -> "AMetricSpace":
        """Wrap a scalar function of one t-tuple into a batched space"""

        def evaluator(tuples: np.ndarray) -> np.ndarray:
            return np.array([float(func(tuple(row))) for row in tuples], dtype=float)

        return cls(arity=arity, dim=dim, evaluator=evaluator, name=name)


def evaluate(space: AMetricSpace, points: Sequence) -> float:
    """
    Evaluate A(x_1, ..., x_t)

    Raises:
        InputShapeError: If the tuple length or point dimension does not match
    """
    array = as_tuple(points, space.arity, space.dim)
    return float(space.batch(array[None, ...])[0])


def lift_metric(base: BaseMetric, t: int, name: Optional[str] = None) -> AMetricSpace:
    """
    Pairwise-sum lift A(x_1, ..., x_t) = sum_{i<j} base(x_i, x_j)

    Satisfies A1-A3 whenever ``base`` is a metric; check_axioms verifies it.
    """
    if t < SPACE_LIMITS.MIN_ARITY or t > SPACE_LIMITS.MAX_ARITY:
        raise InvalidArityError(
            t, f"must lie in [{SPACE_LIMITS.MIN_ARITY}, {SPACE_LIMITS.MAX_ARITY}]"
        )
    rows, cols = np.triu_indices(t, k=1)

    def evaluator(tuples: np.ndarray) -> np.ndarray:
        return base.evaluator(tuples[:, rows, :], tuples[:, cols, :]).sum(axis=1)

    return AMetricSpace(
        arity=t, dim=base.dim, evaluator=evaluator, name=name or f"lift-{base.name}", base=base
    )


def example_space(t: int, d: int = 1) -> AMetricSpace:
    """Sum of pairwise L1 distances; for d == 1 the classical sum of |x_i - x_j|"""
    if t < SPACE_LIMITS.MIN_ARITY:
        raise InvalidArityError(t, f"must be >= {SPACE_LIMITS.MIN_ARITY}")
    return lift_metric(l1_metric(d), t, name="example")


def signed_space(t: int, d: int = 1) -> AMetricSpace:
    """sum_{i<j} sum_k (x_i - x_j)_k; takes negative values, so it is not an A-metric"""
    rows, cols = np.triu_indices(t, k=1)

    def evaluator(tuples: np.ndarray) -> np.ndarray:
        return (tuples[:, rows, :] - tuples[:, cols, :]).sum(axis=(1, 2))

    return AMetricSpace(arity=t, dim=d, evaluator=evaluator, name="signed")


def batch_repeated_distance(space: AMetricSpace, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """A(x, ..., x, y) for every row of xs, ys (shape (n, d) each)"""
    return space.batch(repeat_tuple(xs, ys, space.arity))


def repeated_distance(space: AMetricSpace, x, y) -> float:
    """A(x, ..., x, y) with x repeated t - 1 times"""
    xs = as_point(x, space.dim)[None, :]
    ys = as_point(y, space.dim)[None, :]
    return float(batch_repeated_distance(space, xs, ys)[0])


# ============================================================================
# Axiom checker
# ============================================================================


@dataclass(frozen=True)
class AxiomViolation:
    """A sampled witness against one axiom or lemma"""

    axiom: str
    sample_index: int
    witness: Tuple[Tuple[float, ...], ...]
    lhs: float
    rhs: float

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "index": self.sample_index,
            "tuple": [list(p) for p in self.witness],
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of check_axioms"""

    space_name: str
    samples_checked: int
    violations: Tuple[AxiomViolation, ...] = ()

    @property
    def passed(self) -> bool:
        return len(self.violations) == 0

    def counts(self) -> Dict[str, int]:
        tally = {axiom: 0 for axiom in AXIOM_IDS}
        for violation in self.violations:
            tally[violation.axiom] += 1
        return tally

    def to_dict(self) -> dict:
        return {
            "space": self.space_name,
            "samples_checked": self.samples_checked,
            "passed": self.passed,
            "counts": self.counts(),
            "violations": [v.to_dict() for v in self.violations],
        }


def _witness(*points: np.ndarray) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(c) for c in p) for p in points)


def _collect(
    found: List[AxiomViolation],
    axiom: str,
    mask: np.ndarray,
    offset: int,
    lhs: np.ndarray,
    rhs: np.ndarray,
    witnesses: Callable[[int], Tuple[Tuple[float, ...], ...]],
) -> None:
    for row in np.flatnonzero(mask):
        found.append(
            AxiomViolation(
                axiom=axiom,
                sample_index=offset + int(row),
                witness=witnesses(int(row)),
                lhs=float(lhs[row]),
                rhs=float(rhs[row]),
            )
        )


def check_axioms(
    space: AMetricSpace,
    sampler: Sampler,
    n_samples: int = SAMPLING.N_SAMPLES,
    tol: float = TOLERANCES.ABS,
    rtol: float = TOLERANCES.REL,
) -> AxiomReport:
    """
    Check A1-A3, the symmetry lemma and both triangle-type lemmas by sampling

    Each sample draws a t-tuple x and two extra points y, z. Violations are
    collected with their witnesses; a failing space yields passed=False.

    Args:
        space: Space under test
        sampler: Seeded point sampler of matching dimension
        n_samples: Number of sampled tuples (>= 1)
        tol: Absolute tolerance
        rtol: Relative tolerance

    Returns:
        AxiomReport ordered by sample index within each chunk
    """
    if n_samples < 1:
        raise InputShapeError("n_samples >= 1", str(n_samples))
    t = space.arity
    tuples = sampler.tuples(n_samples, t, stream=SAMPLING.STREAM_TUPLES)
    n = len(tuples)
    ys = sampler.points(n, stream=SAMPLING.STREAM_EXTRA)
    zs = sampler.points(n, stream=SAMPLING.STREAM_ANCHOR)

    logger.info(f"Checking axioms of '{space.name}' (t={t}, d={space.dim}) on {n} samples")
    violations: List[AxiomViolation] = []

    for chunk in iter_chunks(n):
        x, y, z = tuples[chunk], ys[chunk], zs[chunk]
        offset = chunk.start
        values = space.batch(x)

        def tuple_witness(row: int) -> Tuple[Tuple[float, ...], ...]:
            return _witness(*x[row])

        # A1: nonnegativity
        _collect(
            violations, "A1", values < -tol, offset, values, np.zeros_like(values), tuple_witness
        )

        # A2 forward: constant tuples evaluate to zero
        constants = np.repeat(x[:, :1, :], t, axis=1)
        const_values = space.batch(constants)
        _collect(
            violations,
            "A2",
            exceeds(const_values, 0.0, tol, rtol),
            offset,
            const_values,
            np.zeros_like(const_values),
            lambda row: _witness(*constants[row]),
        )

        # A2 reverse: non-constant tuples stay above tol
        non_constant = np.any(x != x[:, :1, :], axis=(1, 2))
        _collect(
            violations,
            "A2",
            non_constant & (values <= tol),
            offset,
            values,
            np.full_like(values, tol),
            tuple_witness,
        )

        # A3: rectangle inequality against an arbitrary y
        rectangle = sum(batch_repeated_distance(space, x[:, i, :], y) for i in range(t))
        _collect(
            violations,
            "A3",
            exceeds(values, rectangle, tol, rtol),
            offset,
            values,
            rectangle,
            lambda row: _witness(*x[row], y[row]),
        )

        first = x[:, 0, :]
        d_xy = batch_repeated_distance(space, first, y)
        d_yx = batch_repeated_distance(space, y, first)
        d_xz = batch_repeated_distance(space, first, z)
        d_zy = batch_repeated_distance(space, z, y)
        d_yz = batch_repeated_distance(space, y, z)

        # Symmetry of repeated distances
        asymmetric = exceeds(d_xy, d_yx, tol, rtol) | exceeds(d_yx, d_xy, tol, rtol)
        _collect(
            violations,
            "L2",
            asymmetric,
            offset,
            d_xy,
            d_yx,
            lambda row: _witness(first[row], y[row]),
        )

        # Both triangle-type inequalities
        bound_a = (t - 1) * d_xy + d_zy
        bound_b = (t - 1) * d_xy + d_yz
        _collect(
            violations,
            "L3a",
            exceeds(d_xz, bound_a, tol, rtol),
            offset,
            d_xz,
            bound_a,
            lambda row: _witness(first[row], y[row], z[row]),
        )
        _collect(
            violations,
            "L3b",
            exceeds(d_xz, bound_b, tol, rtol),
            offset,
            d_xz,
            bound_b,
            lambda row: _witness(first[row], y[row], z[row]),
        )

    report = AxiomReport(space_name=space.name, samples_checked=n, violations=tuple(violations))
    if report.passed:
        logger.info(f"Axioms hold on '{space.name}'")
    else:
        logger.warning(f"'{space.name}' violates axioms: {report.counts()}")
    return report


def is_permutation_invariant(
    space: AMetricSpace, points: Sequence, tol: float = TOLERANCES.ABS
) -> bool:
    """Check that A takes the same value on every transposition of the given tuple"""
    array = as_tuple(points, space.arity, space.dim)
    reference = evaluate(space, array)
    for i, j in combinations(range(space.arity), 2):
        swapped = array.copy()
        swapped[[i, j]] = swapped[[j, i]]
        if abs(evaluate(space, swapped) - reference) > tol * max(1.0, abs(reference)):
            return False
    return True
