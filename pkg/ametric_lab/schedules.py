"""
Mann weight schedules

A schedule yields, for every step n, the weight vector
(alpha_1^n, ..., alpha_t^n). Only alpha_t^n (the weight on f x_n) enters
the convergence factor; the remaining mass is split over the first t - 1
slots, equally unless a custom split is given.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

from .convexity import WeightVector
from .exceptions import InvalidArityError, InvalidParameterError

AlphaFunction = Callable[[int], float]
SplitFunction = Callable[[int, float], Sequence[float]]


class ScheduleKind(Enum):
    """Schedule families"""

    CONSTANT = "constant"
    HARMONIC = "harmonic"
    GEOMETRIC = "geometric"
    POWER = "power"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class Schedule:
    """
    Per-step Mann weights with analytic metadata

    ``diverges`` records whether sum_n alpha_t^n = infinity; ``lower_bound``
    is a positive alpha with alpha <= alpha_t^n for all n, when one exists.
    """

    kind: ScheduleKind
    arity: int
    alpha: AlphaFunction
    diverges: bool
    lower_bound: Optional[float] = None
    split: Optional[SplitFunction] = None
    description: str = ""

    def __post_init__(self):
        if self.arity < 2:
            raise InvalidArityError(self.arity, "schedules need t >= 2")

    def alpha_t(self, n: int) -> float:
        value = float(self.alpha(n))
        if not 0.0 <= value <= 1.0:
            raise InvalidParameterError("alpha_t", value, f"step {n} outside [0, 1]")
        return value

    def weights(self, n: int) -> WeightVector:
        """Weight vector (alpha_1^n, ..., alpha_t^n) for step n"""
        last = self.alpha_t(n)
        rest = 1.0 - last
        if self.split is None:
            head = [rest / (self.arity - 1)] * (self.arity - 1)
        else:
            head = list(self.split(n, rest))
            if len(head) != self.arity - 1:
                raise InvalidParameterError("split", head, f"need {self.arity - 1} entries")
        return WeightVector(tuple(head) + (last,))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "arity": self.arity,
            "diverges": self.diverges,
            "lower_bound": self.lower_bound,
            "description": self.description,
        }


def constant_schedule(t: int, alpha: float) -> Schedule:
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameterError("alpha", alpha, "need 0 <= alpha <= 1")
    positive = alpha > 0.0
    return Schedule(
        kind=ScheduleKind.CONSTANT,
        arity=t,
        alpha=lambda n: alpha,
        diverges=positive,
        lower_bound=alpha if positive else None,
        description=f"alpha_t = {alpha}",
    )


def harmonic_schedule(t: int) -> Schedule:
    return Schedule(
        kind=ScheduleKind.HARMONIC,
        arity=t,
        alpha=lambda n: 1.0 / (n + 2),
        diverges=True,
        description="alpha_t = 1/(n+2)",
    )


def geometric_schedule(t: int, r: float) -> Schedule:
    if not 0.0 < r < 1.0:
        raise InvalidParameterError("r", r, "need 0 < r < 1")
    return Schedule(
        kind=ScheduleKind.GEOMETRIC,
        arity=t,
        alpha=lambda n: r**n,
        diverges=False,
        description=f"alpha_t = {r}^n",
    )


def power_schedule(t: int, p: float) -> Schedule:
    """alpha_t = (n+1)^(-p); the series diverges exactly when p <= 1"""
    if p < 0.0:
        raise InvalidParameterError("p", p, "need p >= 0")
    return Schedule(
        kind=ScheduleKind.POWER,
        arity=t,
        alpha=lambda n: (n + 1.0) ** (-p),
        diverges=p <= 1.0,
        lower_bound=1.0 if p == 0.0 else None,
        description=f"alpha_t = (n+1)^-{p}",
    )


def custom_schedule(
    t: int,
    alpha: AlphaFunction,
    diverges: bool,
    lower_bound: Optional[float] = None,
    split: Optional[SplitFunction] = None,
) -> Schedule:
    if lower_bound is not None and not 0.0 < lower_bound <= 1.0:
        raise InvalidParameterError("lower_bound", lower_bound, "need 0 < alpha <= 1")
    return Schedule(
        kind=ScheduleKind.CUSTOM,
        arity=t,
        alpha=alpha,
        diverges=diverges,
        lower_bound=lower_bound,
        split=split,
        description="custom",
    )


def build_schedule(kind: str, params: dict, t: int) -> Schedule:
    """Build a schedule from its config kind and parameters"""
    if kind == ScheduleKind.CONSTANT.value:
        return constant_schedule(t, float(params.get("alpha", 0.5)))
    if kind == ScheduleKind.HARMONIC.value:
        return harmonic_schedule(t)
    if kind == ScheduleKind.GEOMETRIC.value:
        return geometric_schedule(t, float(params.get("r", 0.5)))
    if kind == ScheduleKind.POWER.value:
        return power_schedule(t, float(params.get("p", 1.0)))
    if kind == ScheduleKind.CUSTOM.value:
        # Config-defined custom schedules are tables of alpha_t^n, last value repeated
        table = [float(v) for v in params.get("alphas", [])]
        if not table:
            raise InvalidParameterError("alphas", table, "custom schedule needs a non-empty table")
        tail = table[-1]
        return custom_schedule(
            t,
            alpha=lambda n: table[n] if n < len(table) else tail,
            diverges=tail > 0.0,
            lower_bound=min(table) if min(table) > 0.0 else None,
        )
    raise InvalidParameterError("schedule.kind", kind, "unknown schedule kind")
