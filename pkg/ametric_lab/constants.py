"""
Library Constants and Defaults

Centralizes tolerances, stop rules and sampling defaults so that every
checker and runner agrees on the same numbers.
"""

from dataclasses import dataclass
from typing import Final


@dataclass(frozen=True)
class Tolerances:
    """Floating-point comparison tolerances"""

    # Inequality checks: lhs <= rhs + ABS + REL * max(|lhs|, |rhs|)
    ABS: Final[float] = 1e-9
    REL: Final[float] = 1e-9

    # Weight vectors
    WEIGHT_SUM: Final[float] = 1e-12  # accepted as-is
    WEIGHT_REJECT: Final[float] = 1e-9  # renormalized below, rejected above

    # Ratio estimators skip pairs whose denominator is below this
    DENOMINATOR: Final[float] = 1e-12


@dataclass(frozen=True)
class SpaceLimits:
    """Admissible shapes of A-metric spaces"""

    MIN_ARITY: Final[int] = 2
    MAX_ARITY: Final[int] = 64
    MIN_DIM: Final[int] = 1


@dataclass(frozen=True)
class SamplingDefaults:
    """Seeded sampler defaults"""

    LOW: Final[float] = -10.0
    HIGH: Final[float] = 10.0
    N_SAMPLES: Final[int] = 10_000
    SEED: Final[int] = 0
    CHUNK_SIZE: Final[int] = 4096

    # Independent random streams
    STREAM_TUPLES: Final[int] = 0
    STREAM_EXTRA: Final[int] = 1
    STREAM_WEIGHTS: Final[int] = 2
    STREAM_ANCHOR: Final[int] = 3


@dataclass(frozen=True)
class IterationDefaults:
    """Stop rule and overflow guard for Picard and Mann runs"""

    MAX_STEPS: Final[int] = 100_000
    DIST_TOL: Final[float] = 1e-12
    CAUCHY_WINDOW: Final[int] = 5

    # Coordinates above this magnitude count as divergence
    DIVERGENCE_GUARD: Final[float] = 1e100

    # Running products switch to log-space below this
    LOG_SPACE_THRESHOLD: Final[float] = 1e-300


@dataclass(frozen=True)
class ContractionDefaults:
    """AZ classification and modulus estimation"""

    GRID_STEP: Final[float] = 0.05
    CONTRACTION_MARGIN: Final[float] = 1e-9


@dataclass(frozen=True)
class StabilityDefaults:
    """Numerical reading of "lim = 0" for stability and the Berinde lemma"""

    TAIL_WINDOW: Final[int] = 20
    LIMIT_TOL: Final[float] = 1e-6
    N_STEPS: Final[int] = 200

    # Berinde envelope test: the second half of the horizon must shrink the tail
    ENVELOPE_SHRINK: Final[float] = 0.75
    ENVELOPE_SLACK: Final[float] = 1e-9


@dataclass(frozen=True)
class OutputDefaults:
    """Serialization formats"""

    CSV_HEADER_PREFIX: Final[str] = "# ametric-lab v"
    MANIFEST_SUFFIX: Final[str] = ".manifest.json"
    FORMATS: Final[tuple] = ("csv", "jsonl")


TOLERANCES = Tolerances()
SPACE_LIMITS = SpaceLimits()
SAMPLING = SamplingDefaults()
ITERATION = IterationDefaults()
CONTRACTION = ContractionDefaults()
STABILITY = StabilityDefaults()
OUTPUT = OutputDefaults()


# Export all configurations
__all__ = [
    "Tolerances",
    "SpaceLimits",
    "SamplingDefaults",
    "IterationDefaults",
    "ContractionDefaults",
    "StabilityDefaults",
    "OutputDefaults",
    "TOLERANCES",
    "SPACE_LIMITS",
    "SAMPLING",
    "ITERATION",
    "CONTRACTION",
    "STABILITY",
    "OUTPUT",
]
