"""
Experiment configuration dataclasses
Type-safe view of the JSON experiment file
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Optional

from ..constants import ITERATION, OUTPUT, SAMPLING, SPACE_LIMITS
from ..convexity import STRUCTURES
from ..exceptions import ConfigError
from ..maps import MAP_BUILDERS
from ..schedules import ScheduleKind
from ..stability import PerturbationKind

SPACE_KINDS = ("example", "lift", "signed")
BASE_METRIC_KINDS = ("l1", "l2", "linf", "discrete")
MAP_KINDS = tuple(MAP_BUILDERS)
STRUCTURE_KINDS = tuple(STRUCTURES)
SCHEDULE_KINDS = tuple(kind.value for kind in ScheduleKind)
RUN_MODES = ("picard", "mann", "stability", "check")
PERTURBATION_KINDS = tuple(kind.value for kind in PerturbationKind)


def _check_keys(section: str, data: Any, allowed: Iterable[str], required: Iterable[str] = ()):
    if not isinstance(data, dict):
        raise ConfigError(section, f"expected an object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(section, f"unknown keys {unknown}")
    missing = sorted(set(required) - set(data))
    if missing:
        raise ConfigError(section, f"missing keys {missing}")


def _check_kind(section: str, kind: str, kinds: Iterable[str]):
    if kind not in kinds:
        raise ConfigError(section, f"unknown kind '{kind}', expected one of {list(kinds)}")


def _params(section: str, data: Dict[str, Any]) -> Dict[str, Any]:
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(section, "params must be an object")
    return dict(params)


@dataclass
class SpaceConfig:
    """A-metric space: kind, arity t, dimension d and base metric of the lift"""

    kind: str = "example"
    t: int = 3
    d: int = 1
    base_metric: str = "l1"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SpaceConfig":
        _check_keys("space", data, ("kind", "t", "d", "base_metric"), required=("t",))
        config = cls(
            kind=data.get("kind", "example"),
            t=int(data["t"]),
            d=int(data.get("d", 1)),
            base_metric=data.get("base_metric", "l1"),
        )
        _check_kind("space", config.kind, SPACE_KINDS)
        _check_kind("space.base_metric", config.base_metric, BASE_METRIC_KINDS)
        if not SPACE_LIMITS.MIN_ARITY <= config.t <= SPACE_LIMITS.MAX_ARITY:
            raise ConfigError(
                "space.t", f"need {SPACE_LIMITS.MIN_ARITY} <= t <= {SPACE_LIMITS.MAX_ARITY}"
            )
        if config.d < SPACE_LIMITS.MIN_DIM:
            raise ConfigError("space.d", "need d >= 1")
        return config

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class MapConfig:
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MapConfig":
        _check_keys("map", data, ("kind", "params"), required=("kind",))
        _check_kind("map", data["kind"], MAP_KINDS)
        return cls(kind=data["kind"], params=_params("map", data))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class StructureConfig:
    kind: str = "weighted_mean"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StructureConfig":
        _check_keys("structure", data, ("kind",))
        config = cls(kind=data.get("kind", "weighted_mean"))
        _check_kind("structure", config.kind, STRUCTURE_KINDS)
        return config

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ScheduleConfig:
    kind: str = "constant"
    params: Dict[str, Any] = field(default_factory=lambda: {"alpha": 0.5})

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScheduleConfig":
        _check_keys("schedule", data, ("kind", "params"), required=("kind",))
        _check_kind("schedule", data["kind"], SCHEDULE_KINDS)
        return cls(kind=data["kind"], params=_params("schedule", data))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunConfig:
    """Run mode and numerical knobs; the seed is mandatory"""

    mode: str
    seed: int
    x0: Optional[List[float]] = None
    n_steps: int = ITERATION.MAX_STEPS
    tol: float = ITERATION.DIST_TOL
    n_samples: int = SAMPLING.N_SAMPLES
    delta: Optional[float] = None
    grid: Optional[List[float]] = None

    FIELDS = ("mode", "seed", "x0", "n_steps", "tol", "n_samples", "delta", "grid")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        _check_keys("run", data, cls.FIELDS, required=("mode", "seed"))
        _check_kind("run.mode", data["mode"], RUN_MODES)
        seed = data["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigError("run.seed", f"expected a non-negative integer, got {seed!r}")
        config = cls(
            mode=data["mode"],
            seed=seed,
            x0=[float(v) for v in data["x0"]] if data.get("x0") is not None else None,
            n_steps=int(data.get("n_steps", ITERATION.MAX_STEPS)),
            tol=float(data.get("tol", ITERATION.DIST_TOL)),
            n_samples=int(data.get("n_samples", SAMPLING.N_SAMPLES)),
            delta=float(data["delta"]) if data.get("delta") is not None else None,
            grid=[float(v) for v in data["grid"]] if data.get("grid") is not None else None,
        )
        if config.n_steps < 1 or config.n_samples < 1:
            raise ConfigError("run", "n_steps and n_samples must be >= 1")
        if not config.tol > 0.0:
            raise ConfigError("run.tol", "need tol > 0")
        return config

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}


@dataclass
class PerturbationConfig:
    kind: str = "none"
    params: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PerturbationConfig":
        _check_keys("perturbation", data, ("kind", "params"), required=("kind",))
        _check_kind("perturbation", data["kind"], PERTURBATION_KINDS)
        return cls(kind=data["kind"], params=_params("perturbation", data))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class OutputConfig:
    format: str = "csv"
    path: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OutputConfig":
        _check_keys("output", data, ("format", "path"))
        config = cls(format=data.get("format", "csv"), path=data.get("path"))
        _check_kind("output.format", config.format, OUTPUT.FORMATS)
        return config

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentConfig:
    """Complete experiment: one space plus the components the run mode needs"""

    space: SpaceConfig
    run: RunConfig
    map: Optional[MapConfig] = None
    structure: StructureConfig = field(default_factory=StructureConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    perturbation: PerturbationConfig = field(default_factory=PerturbationConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    SECTIONS = ("space", "map", "structure", "schedule", "run", "perturbation", "output")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """
        Parse and validate a configuration tree

        Raises:
            ConfigError: On unknown or missing keys, unknown kinds or bad values
        """
        _check_keys("<root>", data, cls.SECTIONS, required=("space", "run"))
        config = cls(
            space=SpaceConfig.from_dict(data["space"]),
            run=RunConfig.from_dict(data["run"]),
            map=MapConfig.from_dict(data["map"]) if "map" in data else None,
            structure=StructureConfig.from_dict(data.get("structure", {})),
            schedule=(
                ScheduleConfig.from_dict(data["schedule"])
                if "schedule" in data
                else ScheduleConfig()
            ),
            perturbation=(
                PerturbationConfig.from_dict(data["perturbation"])
                if "perturbation" in data
                else PerturbationConfig()
            ),
            output=OutputConfig.from_dict(data.get("output", {})),
        )
        if config.run.x0 is not None and len(config.run.x0) != config.space.d:
            raise ConfigError("run.x0", f"expected {config.space.d} coordinates")
        if config.run.mode in ("picard", "mann", "stability") and config.map is None:
            raise ConfigError("map", f"run mode '{config.run.mode}' needs a map")
        return config

    def with_overrides(
        self, seed: Optional[int] = None, out: Optional[str] = None, fmt: Optional[str] = None
    ) -> "ExperimentConfig":
        """Apply command-line overrides in place and return self"""
        if seed is not None:
            if seed < 0:
                raise ConfigError("--seed", "need a non-negative integer")
            self.run.seed = seed
        if out is not None:
            self.output.path = out
        if fmt is not None:
            _check_kind("--format", fmt, OUTPUT.FORMATS)
            self.output.format = fmt
        return self

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "map": self.map.to_dict() if self.map else None,
            "structure": self.structure.to_dict(),
            "schedule": self.schedule.to_dict(),
            "run": self.run.to_dict(),
            "perturbation": self.perturbation.to_dict(),
            "output": self.output.to_dict(),
        }
