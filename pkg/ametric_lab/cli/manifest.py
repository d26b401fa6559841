"""
Run manifest written next to every output file
"""

import hashlib
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import psutil

from .. import __version__
from ..constants import OUTPUT
from ..services.report_writer import write_json

logger = logging.getLogger(__name__)


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for chunk in iter(lambda: handle.read(8192), b""):
            digest.update(chunk)
    return digest.hexdigest()


def peak_rss_bytes() -> int:
    """Peak resident set size where the platform reports it, current RSS otherwise"""
    info = psutil.Process().memory_info()
    return int(getattr(info, "peak_wset", info.rss))


def manifest_path(output: Union[str, Path]) -> Path:
    return Path(f"{output}{OUTPUT.MANIFEST_SUFFIX}")


@dataclass
class RunManifest:
    command: str
    config_path: str
    config_sha256: str
    seed: int
    output: str
    success: bool
    wall_time_s: float
    version: str = __version__
    peak_rss_bytes: int = 0
    verdicts: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @classmethod
    def create(
        cls,
        command: str,
        config_path: Union[str, Path],
        seed: int,
        output: Union[str, Path],
        success: bool,
        wall_time_s: float,
        verdicts: Dict[str, Any],
        warnings: List[str],
    ) -> "RunManifest":
        return cls(
            command=command,
            config_path=str(config_path),
            config_sha256=sha256_file(config_path),
            seed=seed,
            output=str(output),
            success=success,
            wall_time_s=wall_time_s,
            peak_rss_bytes=peak_rss_bytes(),
            verdicts=verdicts,
            warnings=list(warnings),
        )

    def to_dict(self) -> dict:
        return asdict(self)

    def write(self) -> Path:
        path = manifest_path(self.output)
        write_json(path, self.to_dict())
        logger.debug(f"Wrote manifest {path}")
        return path
