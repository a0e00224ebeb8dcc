"""Checkpoint files for resumable census runs.

A checkpoint is a JSON document::

    {"params": {...}, "fingerprint": "<sha256>",
     "stages": {"<stage>": {"layout": {...}, "completed_shards": [...], "partial": {...}}}}

A run consists of one or more stages (the orbit pass, the group-side pass,
the sampling pass); each stage records the shard layout it was started with,
the ids of finished shards and the merged partial result. Only the driver
process writes the file, and every write replaces it atomically.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)


class CheckpointMismatchError(ValueError):
    """Raised when a checkpoint was written for different run parameters."""


def params_fingerprint(params: dict[str, Any]) -> str:
    """Compute the SHA256 of the canonical JSON form of run parameters.

    Args:
        params: JSON-serialisable parameters.

    Returns:
        Hexadecimal SHA256 hash string.
    """
    canonical = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_checkpoint(path: str | Path | None, params: dict[str, Any]) -> dict[str, dict[str, Any]]:
    """Load the stages of a checkpoint.

    Args:
        path: Checkpoint file; None or a missing file means a fresh run.
        params: Parameters of the current run.

    Returns:
        Mapping stage name -> {"layout", "completed_shards", "partial"}; empty for a fresh run.

    Raises:
        CheckpointMismatchError: If the file was written for other parameters.
        ValueError: If the file is not a checkpoint document.
    """
    if path is None:
        return {}
    checkpoint_path = Path(path).expanduser()
    if not checkpoint_path.exists():
        logger.info("No checkpoint at %s, starting fresh", checkpoint_path)
        return {}

    with open(checkpoint_path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict) or "fingerprint" not in data:
        raise ValueError(f"not a checkpoint file: {checkpoint_path}")

    if data["fingerprint"] != params_fingerprint(params):
        logger.warning("Checkpoint %s was written for %s", checkpoint_path, data.get("params"))
        raise CheckpointMismatchError(
            f"checkpoint {checkpoint_path} belongs to a run with different parameters"
        )

    stages = data.get("stages", {})
    for name, stage in stages.items():
        logger.info(
            "Resuming stage %s from %s: %d shards already complete",
            name, checkpoint_path, len(stage.get("completed_shards", [])),
        )
    return stages


def write_checkpoint(path: str | Path, params: dict[str, Any], stages: dict[str, dict[str, Any]]) -> Path:
    """Atomically write a checkpoint.

    Raises:
        OSError: If the directory is not writable.
    """
    checkpoint_path = Path(path).expanduser()
    checkpoint_path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "params": params,
        "fingerprint": params_fingerprint(params),
        "stages": stages,
    }
    tmp_path = checkpoint_path.with_name(checkpoint_path.name + ".tmp")
    with open(tmp_path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2)
    os.replace(tmp_path, checkpoint_path)
    logger.debug("Checkpoint written: %s", checkpoint_path)
    return checkpoint_path


class Checkpoint:
    """Stage-wise checkpoint state of one run; a no-op store when path is None.

    Attributes:
        path: Checkpoint file, or None.
        params: Run parameters the file is bound to.
    """

    def __init__(self, path: str | Path | None, params: dict[str, Any]):
        self.path = None if path is None else Path(path).expanduser()
        self.params = params
        self._stages = load_checkpoint(self.path, params)

    def layout(self, stage: str) -> dict[str, Any] | None:
        entry = self._stages.get(stage)
        return None if entry is None else entry["layout"]

    def completed(self, stage: str) -> set[int]:
        entry = self._stages.get(stage)
        return set() if entry is None else {int(i) for i in entry["completed_shards"]}

    def partial(self, stage: str) -> dict[str, Any] | None:
        entry = self._stages.get(stage)
        return None if entry is None else entry["partial"]

    def record(self, stage: str, layout: dict[str, Any], completed: set[int], partial: dict[str, Any]) -> None:
        """Store a stage's progress and write the file when a path is set."""
        self._stages[stage] = {
            "layout": layout,
            "completed_shards": sorted(completed),
            "partial": partial,
        }
        if self.path is not None:
            write_checkpoint(self.path, self.params, self._stages)


__all__ = [
    "Checkpoint",
    "CheckpointMismatchError",
    "load_checkpoint",
    "params_fingerprint",
    "write_checkpoint",
]
