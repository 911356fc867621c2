#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Run manifests: a JSON snapshot of the configuration and provenance of a run,
written before training starts and updated with timings when it ends.
"""

import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, ValidationError

from gnflow import __version__
from gnflow.errors import DataError
from gnflow.training.config import ExperimentConfig, build_config
from gnflow.utils.textio import PathLike, open_for_read, open_for_write

logger = logging.getLogger("cli")

MANIFEST_VERSION = "gnflow-manifest-v1"
MANIFEST_NAME = "manifest.json"


class RunManifest(BaseModel):
    format: str = MANIFEST_VERSION
    command: str
    version: str = __version__
    seed: int
    output_dir: str
    data: Optional[str] = None
    config: Dict[str, Any]
    started_at: float = Field(default_factory=time.time)
    timings: Dict[str, float] = Field(default_factory=dict)
    status: str = "running"

    @classmethod
    def start(cls, command: str, config: ExperimentConfig, output_dir: PathLike,
              data: Optional[PathLike] = None) -> "RunManifest":
        return cls(command=command, seed=config.seed, output_dir=str(output_dir),
                   data=str(data) if data is not None else None,
                   config=config.model_dump(mode="json"))

    def experiment_config(self) -> ExperimentConfig:
        return build_config(self.config)


def write_manifest(path: PathLike, manifest: RunManifest) -> None:
    with open_for_write(path) as f:
        f.write(manifest.model_dump_json(indent=2))
        f.write("\n")
    logger.debug(f"Wrote manifest {path} ({manifest.status})")


def read_manifest(path: PathLike) -> RunManifest:
    with open_for_read(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise DataError(f"{path}: manifest is not valid JSON: {e}") from None
    if raw.get("format") != MANIFEST_VERSION:
        raise DataError(f"{path}: unsupported manifest format {raw.get('format')!r}")
    try:
        return RunManifest(**raw)
    except ValidationError as e:
        raise DataError(f"{path}: malformed manifest: {e}") from None


def manifest_path(output_dir: PathLike) -> Path:
    return Path(output_dir) / MANIFEST_NAME
