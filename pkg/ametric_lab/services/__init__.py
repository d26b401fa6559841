"""Service layer: experiment wiring and report writing"""

from ametric_lab.services.experiment_service import CommandOutcome, ExperimentService
from ametric_lab.services.report_writer import write_artifact, write_json

__all__ = [
    "CommandOutcome",
    "ExperimentService",
    "write_artifact",
    "write_json",
]
