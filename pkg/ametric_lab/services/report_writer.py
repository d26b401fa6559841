"""
Report Writer
Single Responsibility: serialize traces and reports to files
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

from .. import __version__
from ..constants import OUTPUT
from ..iteration import IterationTrace
from ..stability import StabilityReport

logger = logging.getLogger(__name__)

Cell = Union[None, int, float, str]


def _cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trace_rows(trace: IterationTrace) -> List[List[Cell]]:
    """n, x_0 .. x_{d-1}, dist_to_u, bound"""
    return [[step.n, *step.x, step.dist_to_u, step.bound] for step in trace.steps]


def trace_header(dim: int) -> List[str]:
    return ["n", *[f"x_{i}" for i in range(dim)], "dist_to_u", "bound"]


def stability_rows(report: StabilityReport) -> List[List[Cell]]:
    """n, y_0 .. y_{d-1}, eps, dist_to_u"""
    return [[step.n, *step.y, step.eps, step.dist_to_u] for step in report.steps]


def stability_header(dim: int) -> List[str]:
    return ["n", *[f"y_{i}" for i in range(dim)], "eps", "dist_to_u"]


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> None:
    """CSV with a version comment line; floats via repr so reruns are byte-identical"""
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"{OUTPUT.CSV_HEADER_PREFIX}{__version__}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])


def write_jsonl(path: Path, header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> None:
    with path.open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(dict(zip(header, row))) + "\n")


def write_rows(path: Path, fmt: str, header: Sequence[str], rows: Iterable[Sequence[Cell]]):
    if fmt == "csv":
        write_csv(path, header, rows)
    else:
        write_jsonl(path, header, rows)


def write_json(path: Path, payload: Any) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_artifact(artifact: Any, path: Union[str, Path], fmt: str) -> Path:
    """
    Write a command artifact

    Traces and stability reports go to CSV or JSON-lines; property reports
    are written as one JSON document whatever the format.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(artifact, IterationTrace):
        dim = len(artifact.steps[0].x)
        write_rows(path, fmt, trace_header(dim), trace_rows(artifact))
    elif isinstance(artifact, StabilityReport):
        dim = len(artifact.u)
        write_rows(path, fmt, stability_header(dim), stability_rows(artifact))
    else:
        write_json(path, artifact.to_dict())
    logger.info(f"Wrote {type(artifact).__name__} to {path}")
    return path
