"""
Experiment Service
Single Responsibility: turn an ExperimentConfig into components and run them
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..ametric_core import (
    BASE_METRICS,
    AMetricSpace,
    AxiomReport,
    check_axioms,
    example_space,
    lift_metric,
    signed_space,
)
from ..config import ExperimentConfig
from ..contraction import AZReport, DeltaEstimate, classify_az, estimate_delta
from ..convexity import STRUCTURES, ConvexityReport, ConvexStructure, check_convexity
from ..exceptions import ConfigError
from ..iteration import IterationTrace, StopRule, mann_run, picard_run
from ..maps import SelfMap, build_map
from ..sampling import GridSampler, PointSampler, Sampler
from ..schedules import Schedule, build_schedule
from ..stability import (
    Perturbation,
    StabilityReport,
    StabilityVerdict,
    build_perturbation,
    converse_bound_check,
    forward_bound_check,
    perturbed_run,
)

logger = logging.getLogger(__name__)


@dataclass
class CommandOutcome:
    """What a command produced: the artifact to write and its verdict summary"""

    command: str
    success: bool
    artifact: Any
    summary: Dict[str, Any]
    warnings: List[str] = field(default_factory=list)


class ExperimentService:
    """
    Service wiring spaces, maps, structures, schedules and perturbations

    Every component is built from the config on demand; the service holds no
    state besides the config.
    """

    def __init__(self, config: ExperimentConfig):
        """
        Initialize experiment service

        Args:
            config: Validated experiment configuration
        """
        self.config = config

    # ------------------------------------------------------------------
    # Component builders
    # ------------------------------------------------------------------

    def build_space(self) -> AMetricSpace:
        space = self.config.space
        if space.kind == "example":
            return example_space(space.t, space.d)
        if space.kind == "signed":
            return signed_space(space.t, space.d)
        return lift_metric(BASE_METRICS[space.base_metric](space.d), space.t)

    def build_map(self) -> SelfMap:
        if self.config.map is None:
            raise ConfigError("map", "this command needs a map section")
        return build_map(self.config.map.kind, self.config.map.params, self.config.space.d)

    def build_structure(self) -> ConvexStructure:
        return STRUCTURES[self.config.structure.kind](self.config.space.t, self.config.space.d)

    def build_schedule(self) -> Schedule:
        schedule = self.config.schedule
        return build_schedule(schedule.kind, schedule.params, self.config.space.t)

    def build_perturbation(self) -> Perturbation:
        perturbation = self.config.perturbation
        return build_perturbation(perturbation.kind, perturbation.params, self.config.space.d)

    def build_sampler(self) -> Sampler:
        """Grid sampler when run.grid is set, otherwise a seeded box sampler anchored at 0"""
        run, d = self.config.run, self.config.space.d
        if run.grid is not None:
            return GridSampler(dim=d, values=tuple(run.grid), seed=run.seed)
        return PointSampler(dim=d, seed=run.seed, anchors=((0.0,) * d,))

    def start_point(self) -> np.ndarray:
        x0 = self.config.run.x0
        return np.ones(self.config.space.d) if x0 is None else np.asarray(x0, dtype=float)

    def stop_rule(self) -> StopRule:
        return StopRule(max_steps=self.config.run.n_steps, dist_tol=self.config.run.tol)

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def check_axioms(self) -> CommandOutcome:
        report: AxiomReport = check_axioms(
            self.build_space(), self.build_sampler(), self.config.run.n_samples
        )
        summary = {
            "space": report.space_name,
            "samples_checked": report.samples_checked,
            "passed": report.passed,
            "violations": report.counts(),
        }
        return CommandOutcome("check-axioms", report.passed, report, summary)

    def check_convexity(self) -> CommandOutcome:
        report: ConvexityReport = check_convexity(
            self.build_space(),
            self.build_structure(),
            self.build_sampler(),
            self.config.run.n_samples,
        )
        summary = {
            "space": report.space_name,
            "structure": report.structure_name,
            "samples_checked": report.samples_checked,
            "passed": report.passed,
            "violations": len(report.violations),
        }
        return CommandOutcome("check-convex", report.passed, report, summary)

    def classify_map(self) -> CommandOutcome:
        report: AZReport = classify_az(
            self.build_space(),
            self.build_map(),
            None,
            self.build_sampler(),
            self.config.run.n_samples,
        )
        summary = {
            "map": report.map_name,
            "samples_checked": report.samples_checked,
            "is_az": report.is_az,
            "params": report.params.to_dict(),
            "conditions": report.condition_counts(),
            "failures": len(report.failures),
        }
        return CommandOutcome("classify-map", report.is_az, report, summary)

    def estimate_delta(self) -> CommandOutcome:
        estimate: DeltaEstimate = estimate_delta(
            self.build_space(), self.build_map(), self.build_sampler(), self.config.run.n_samples
        )
        return CommandOutcome("estimate-delta", estimate.contraction, estimate, estimate.to_dict())

    def run(self) -> CommandOutcome:
        """
        Picard or Mann run as selected by run.mode

        Raises:
            ConfigError: If run.mode is not picard or mann
            DivergenceError: When the iterates leave the finite range
        """
        mode = self.config.run.mode
        space, f = self.build_space(), self.build_map()
        if mode == "picard":
            trace: IterationTrace = picard_run(space, f, self.start_point(), self.stop_rule())
        elif mode == "mann":
            trace = mann_run(
                space,
                self.build_structure(),
                f,
                self.start_point(),
                self.build_schedule(),
                self.stop_rule(),
                delta=self.config.run.delta,
            )
        else:
            raise ConfigError("run.mode", f"'run' needs mode picard or mann, got '{mode}'")

        warnings = []
        if trace.converged and not trace.limit_is_fixed_point():
            warnings.append(f"stationary limit is not a fixed point (residual {trace.residual!r})")
        return CommandOutcome("run", trace.converged, trace, trace.summary(), warnings)

    def stability(self) -> CommandOutcome:
        """Perturbed Mann run; bound checks are added when run.delta is set"""
        if self.config.run.mode != "stability":
            raise ConfigError("run.mode", "'stability' needs mode stability")
        space, schedule = self.build_space(), self.build_schedule()
        report: StabilityReport = perturbed_run(
            space,
            self.build_structure(),
            self.build_map(),
            self.start_point(),
            schedule,
            self.build_perturbation(),
            n_steps=self.config.run.n_steps,
            seed=self.config.run.seed,
            n_samples=self.config.run.n_samples,
        )
        summary = report.summary()
        delta: Optional[float] = self.config.run.delta
        if delta is not None:
            summary["forward_bound"] = forward_bound_check(
                report, delta, schedule, space.arity
            ).to_dict()
            summary["converse_bound"] = converse_bound_check(
                report, delta, schedule, space.arity
            ).to_dict()
        success = report.verdict is not StabilityVerdict.VIOLATION
        return CommandOutcome("stability", success, report, summary, list(report.warnings))
