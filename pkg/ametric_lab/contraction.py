"""
Zamfirescu-type (AZ) contractions

Classifies self-maps against the three AZ conditions and estimates the
unified contraction modulus delta for which

    A(fx,...,fx,fy) <= delta A(x,...,x,y) + t delta A(fx,...,fx,x)      (eq1)
    A(fx,...,fx,fy) <= delta A(x,...,x,y) + t delta A(fy,...,fy,x)      (eq2)

hold on every sampled pair.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .ametric_core import AMetricSpace, batch_repeated_distance
from .constants import CONTRACTION, SAMPLING, TOLERANCES
from .exceptions import InputShapeError, InvalidModulusError, InvalidParameterError
from .maps import SelfMap
from .sampling import Sampler
from .tolerance import exceeds

logger = logging.getLogger(__name__)

CONDITIONS: Tuple[str, ...] = ("AZ1", "AZ2", "AZ3")


@dataclass(frozen=True)
class AZParams:
    """Constants 0 <= a < 1 and 0 <= b, c < 1/t"""

    a: float
    b: float
    c: float

    def validate(self, t: int) -> "AZParams":
        if not 0.0 <= self.a < 1.0:
            raise InvalidParameterError("a", self.a, "need 0 <= a < 1")
        for name, value in (("b", self.b), ("c", self.c)):
            if not 0.0 <= value < 1.0 / t:
                raise InvalidParameterError(name, value, f"need 0 <= {name} < 1/{t}")
        return self

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c}


@dataclass(frozen=True)
class PairTerms:
    """Repeated distances entering the AZ conditions for a batch of pairs"""

    xs: np.ndarray
    ys: np.ndarray
    fx_fy: np.ndarray
    x_y: np.ndarray
    fx_x: np.ndarray
    fy_y: np.ndarray
    fx_y: np.ndarray
    fy_x: np.ndarray

    @classmethod
    def compute(
        cls, space: AMetricSpace, f: SelfMap, xs: np.ndarray, ys: np.ndarray
    ) -> "PairTerms":
        if f.dim != space.dim:
            raise InputShapeError(f"map on R^{space.dim}", f"map on R^{f.dim}")
        fxs = f.apply_batch(xs)
        fys = f.apply_batch(ys)

        def rd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
            return batch_repeated_distance(space, a, b)

        return cls(
            xs=xs,
            ys=ys,
            fx_fy=rd(fxs, fys),
            x_y=rd(xs, ys),
            fx_x=rd(fxs, xs),
            fy_y=rd(fys, ys),
            fx_y=rd(fxs, ys),
            fy_x=rd(fys, xs),
        )

    def __len__(self) -> int:
        return len(self.xs)

    def condition_masks(self, params: AZParams, tol: float, rtol: float) -> np.ndarray:
        """Boolean array (n, 3): which of AZ1, AZ2, AZ3 hold on each pair"""
        return np.stack(
            [
                ~exceeds(self.fx_fy, params.a * self.x_y, tol, rtol),
                ~exceeds(self.fx_fy, params.b * (self.fx_x + self.fy_y), tol, rtol),
                ~exceeds(self.fx_fy, params.c * (self.fx_y + self.fy_x), tol, rtol),
            ],
            axis=1,
        )


def _sample_pairs(sampler: Sampler, n_samples: int) -> Tuple[np.ndarray, np.ndarray]:
    if n_samples < 1:
        raise InputShapeError("n_samples >= 1", str(n_samples))
    pairs = sampler.tuples(n_samples, 2, stream=SAMPLING.STREAM_TUPLES)
    return pairs[:, 0, :], pairs[:, 1, :]


def _point(p: np.ndarray) -> Tuple[float, ...]:
    return tuple(float(c) for c in p)


# ============================================================================
# AZ classification
# ============================================================================


@dataclass(frozen=True)
class AZFailure:
    """Pair on which none of the three conditions holds"""

    sample_index: int
    x: Tuple[float, ...]
    y: Tuple[float, ...]
    lhs: float
    rhs: Tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "index": self.sample_index,
            "x": list(self.x),
            "y": list(self.y),
            "lhs": self.lhs,
            "rhs": dict(zip(CONDITIONS, self.rhs)),
        }


@dataclass(frozen=True, eq=False)
class AZReport:
    """Outcome of classify_az; ``held`` is the per-pair record of (AZ1, AZ2, AZ3)"""

    map_name: str
    space_name: str
    samples_checked: int
    params: Optional[AZParams]
    held: np.ndarray
    failures: Tuple[AZFailure, ...] = ()
    searched: bool = False

    @property
    def is_az(self) -> bool:
        return self.params is not None and len(self.failures) == 0

    def condition_counts(self) -> Dict[str, int]:
        return {name: int(self.held[:, i].sum()) for i, name in enumerate(CONDITIONS)}

    def to_dict(self) -> dict:
        return {
            "map": self.map_name,
            "space": self.space_name,
            "samples_checked": self.samples_checked,
            "params": self.params.to_dict() if self.params else None,
            "searched": self.searched,
            "is_az": self.is_az,
            "condition_counts": self.condition_counts(),
            "failures": [failure.to_dict() for failure in self.failures],
        }


def parameter_grid(limit: float, step: float = CONTRACTION.GRID_STEP) -> List[float]:
    """Values 0, step, 2 step, ... strictly below ``limit``"""
    values = []
    k = 0
    while round(k * step, 10) < limit - 1e-12:
        values.append(round(k * step, 10))
        k += 1
    return values


def _failures(terms: PairTerms, params: AZParams, held: np.ndarray) -> Tuple[AZFailure, ...]:
    failing = np.flatnonzero(~held.any(axis=1))
    return tuple(
        AZFailure(
            sample_index=int(row),
            x=_point(terms.xs[row]),
            y=_point(terms.ys[row]),
            lhs=float(terms.fx_fy[row]),
            rhs=(
                float(params.a * terms.x_y[row]),
                float(params.b * (terms.fx_x[row] + terms.fy_y[row])),
                float(params.c * (terms.fx_y[row] + terms.fy_x[row])),
            ),
        )
        for row in failing
    )


def _search_params(
    terms: PairTerms, t: int, tol: float, rtol: float
) -> Tuple[AZParams, np.ndarray]:
    """First (a, b, c) on the grid that satisfies every pair, else the one failing fewest"""
    a_grid = parameter_grid(1.0)
    bc_grid = parameter_grid(1.0 / t)
    az1 = {a: ~exceeds(terms.fx_fy, a * terms.x_y, tol, rtol) for a in a_grid}
    az2 = {b: ~exceeds(terms.fx_fy, b * (terms.fx_x + terms.fy_y), tol, rtol) for b in bc_grid}
    az3 = {c: ~exceeds(terms.fx_fy, c * (terms.fx_y + terms.fy_x), tol, rtol) for c in bc_grid}

    best: Optional[Tuple[int, AZParams]] = None
    for a in a_grid:
        for b in bc_grid:
            partial = az1[a] | az2[b]
            for c in bc_grid:
                failing = int((~(partial | az3[c])).sum())
                if best is None or failing < best[0]:
                    best = (failing, AZParams(a, b, c))
                if failing == 0:
                    params = AZParams(a, b, c)
                    return params, np.stack([az1[a], az2[b], az3[c]], axis=1)
    assert best is not None
    params = best[1]
    return params, np.stack([az1[params.a], az2[params.b], az3[params.c]], axis=1)


def classify_az(
    space: AMetricSpace,
    f: SelfMap,
    params: Optional[AZParams],
    sampler: Sampler,
    n_samples: int = SAMPLING.N_SAMPLES,
    tol: float = TOLERANCES.ABS,
    rtol: float = TOLERANCES.REL,
) -> AZReport:
    """
    Check whether f is an AZ mapping on the sampled pairs

    A pair passes when at least one of AZ1-AZ3 holds within tolerance; the
    map is AZ when every pair passes. Without ``params`` a grid search over
    the admissible boxes picks the first satisfying triple. When no triple
    works the report carries the triple with the fewest failing pairs and
    is_az is False.
    """
    t = space.arity
    xs, ys = _sample_pairs(sampler, n_samples)
    terms = PairTerms.compute(space, f, xs, ys)
    logger.info(f"Classifying '{f.name}' on '{space.name}' over {len(terms)} pairs")

    if params is not None:
        params.validate(t)
        held = terms.condition_masks(params, tol, rtol)
        searched = False
    else:
        params, held = _search_params(terms, t, tol, rtol)
        searched = True

    failures = _failures(terms, params, held)
    if failures:
        logger.info(f"'{f.name}' is not AZ: {len(failures)} failing pairs at {params.to_dict()}")
    else:
        logger.info(f"'{f.name}' is AZ with {params.to_dict()}")
    return AZReport(
        map_name=f.name,
        space_name=space.name,
        samples_checked=len(terms),
        params=params,
        held=held,
        failures=failures,
        searched=searched,
    )


# ============================================================================
# Contraction modulus
# ============================================================================


@dataclass(frozen=True)
class DeltaEstimate:
    """Supremum of the sampled delta ratios"""

    delta_hat: float
    witness_pair: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]]
    witness_equation: Optional[str]
    samples_checked: int
    skipped: int
    margin: float = CONTRACTION.CONTRACTION_MARGIN

    @property
    def contraction(self) -> bool:
        return self.delta_hat < 1.0 - self.margin

    def to_dict(self) -> dict:
        return {
            "delta_hat": self.delta_hat,
            "contraction": self.contraction,
            "witness_pair": [list(p) for p in self.witness_pair] if self.witness_pair else None,
            "witness_equation": self.witness_equation,
            "samples_checked": self.samples_checked,
            "skipped": self.skipped,
        }


def _ratios(terms: PairTerms, t: int, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    den1 = terms.x_y + t * terms.fx_x
    den2 = terms.x_y + t * terms.fy_x
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(den1 >= tol, terms.fx_fy / den1, -np.inf)
        r2 = np.where(den2 >= tol, terms.fx_fy / den2, -np.inf)
    return r1, r2


def estimate_delta(
    space: AMetricSpace,
    f: SelfMap,
    sampler: Sampler,
    n_samples: int = SAMPLING.N_SAMPLES,
    tol: float = TOLERANCES.DENOMINATOR,
) -> DeltaEstimate:
    """
    Estimate delta as the largest sampled ratio of either unified inequality

    Pairs whose denominator is below ``tol`` are skipped and counted: there
    x = y and f(x) = x, so both sides vanish.
    """
    t = space.arity
    xs, ys = _sample_pairs(sampler, n_samples)
    terms = PairTerms.compute(space, f, xs, ys)
    r1, r2 = _ratios(terms, t, tol)
    skipped = int(np.sum((r1 == -np.inf) | (r2 == -np.inf)))

    best1, best2 = int(np.argmax(r1)), int(np.argmax(r2))
    if r1[best1] == -np.inf and r2[best2] == -np.inf:
        logger.warning(f"Every sampled pair was degenerate for '{f.name}'")
        return DeltaEstimate(0.0, None, None, len(terms), skipped)

    if r1[best1] >= r2[best2]:
        row, delta_hat, equation = best1, float(r1[best1]), "eq1"
    else:
        row, delta_hat, equation = best2, float(r2[best2]), "eq2"
    estimate = DeltaEstimate(
        delta_hat=delta_hat,
        witness_pair=(_point(terms.xs[row]), _point(terms.ys[row])),
        witness_equation=equation,
        samples_checked=len(terms),
        skipped=skipped,
    )
    logger.info(
        f"delta_hat for '{f.name}' = {delta_hat:.6g} ({equation}, {skipped} skipped pairs)"
    )
    return estimate


@dataclass(frozen=True)
class InequalityViolation:
    """Pair violating eq1 or eq2 for the given delta"""

    sample_index: int
    equation: str
    x: Tuple[float, ...]
    y: Tuple[float, ...]
    lhs: float
    rhs: float

    def to_dict(self) -> dict:
        return {
            "index": self.sample_index,
            "equation": self.equation,
            "x": list(self.x),
            "y": list(self.y),
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


@dataclass(frozen=True)
class ContractionCheckReport:
    """Outcome of verify_contraction_inequalities"""

    map_name: str
    delta: float
    samples_checked: int
    violations: Tuple[InequalityViolation, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return len(self.violations) == 0

    def to_dict(self) -> dict:
        return {
            "map": self.map_name,
            "delta": self.delta,
            "samples_checked": self.samples_checked,
            "passed": self.passed,
            "violations": [v.to_dict() for v in self.violations],
        }


def verify_contraction_inequalities(
    space: AMetricSpace,
    f: SelfMap,
    delta: float,
    sampler: Sampler,
    n_samples: int = SAMPLING.N_SAMPLES,
    tol: float = TOLERANCES.ABS,
    rtol: float = TOLERANCES.REL,
) -> ContractionCheckReport:
    """
    Assert eq1 and eq2 with the given delta on every sampled pair

    Raises:
        InvalidModulusError: If delta is outside [0, 1)
    """
    if not 0.0 <= delta < 1.0:
        raise InvalidModulusError(delta)
    t = space.arity
    xs, ys = _sample_pairs(sampler, n_samples)
    terms = PairTerms.compute(space, f, xs, ys)

    rhs1 = delta * terms.x_y + t * delta * terms.fx_x
    rhs2 = delta * terms.x_y + t * delta * terms.fy_x
    violations: List[InequalityViolation] = []
    for equation, rhs in (("eq1", rhs1), ("eq2", rhs2)):
        for row in np.flatnonzero(exceeds(terms.fx_fy, rhs, tol, rtol)):
            violations.append(
                InequalityViolation(
                    sample_index=int(row),
                    equation=equation,
                    x=_point(terms.xs[row]),
                    y=_point(terms.ys[row]),
                    lhs=float(terms.fx_fy[row]),
                    rhs=float(rhs[row]),
                )
            )
    violations.sort(key=lambda v: (v.sample_index, v.equation))

    report = ContractionCheckReport(
        map_name=f.name, delta=delta, samples_checked=len(terms), violations=tuple(violations)
    )
    logger.info(
        f"Unified inequalities for '{f.name}' at delta={delta:.6g}: "
        f"{'pass' if report.passed else f'{len(violations)} violations'}"
    )
    return report
