#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Experiment configuration.

Sources, lowest to highest precedence: model defaults, a JSON preset, a flat
`key = value` file and explicit overrides (command-line flags).
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from gnflow.errors import ConfigError

logger = logging.getLogger("config")

PRESETS_DIR = Path(os.path.dirname(os.path.abspath(__file__))).parent / "presets"
SEED_ENV = "GNFLOW_SEED"

# (max nodes, eta, gamma_al), synthetic rows of the graph-learning hyperparameters
AL_DEFAULTS = (
    (3, 3.0, 0.30),
    (5, 5.0, 0.25),
    (15, 7.0, 0.21),
    (25, 7.0, 0.19),
)
AL_FALLBACK = (7.0, 0.16)


def al_defaults(nodes: int) -> Tuple[float, float]:
    """(eta, gamma_al) for a graph with `nodes` nodes"""
    for limit, eta, gamma in AL_DEFAULTS:
        if nodes <= limit:
            return eta, gamma
    return AL_FALLBACK


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    # data
    system: Literal["sink", "triangle", "sawtooth", "square"] = "triangle"
    nodes: int = Field(5, ge=1)
    times: int = Field(100, ge=1)
    samples: int = Field(200, ge=3)
    density: float = Field(0.3, gt=0.0, le=1.0)
    mask_rate: float = Field(0.0, ge=0.0, lt=1.0)
    split: Tuple[float, float, float] = (0.6, 0.2, 0.2)
    seed: int = 0

    # model
    arch: str = "resnet"
    graph: Literal["learned", "truth", "none"] = "learned"
    task: Literal["forecast", "smoothing", "filtering"] = "forecast"
    hidden: int = Field(64, ge=1)
    mlp_layers: int = Field(2, ge=0)
    gcn_hidden: int = Field(16, ge=1)
    lipschitz_bound: float = Field(0.9, gt=0.0, lt=1.0)
    contraction: bool = True
    init_scale: float = Field(0.1, gt=0.0)
    alpha: float = Field(2.0 / 11.0, gt=0.0)
    beta: float = Field(1.0, gt=0.0)
    strict_invertibility: bool = True
    coupling_blocks: int = Field(2, ge=1)
    trunk_layers: int = Field(1, ge=1)
    head_layers: int = Field(1, ge=1)

    # optimization
    epochs: int = Field(100, ge=0)
    patience: int = Field(10, ge=1)
    outer_iterations: int = Field(20, ge=1)
    batch_size: int = Field(50, ge=1)
    lr: float = Field(1e-3, gt=0.0)

    # augmented Lagrangian
    eta: Optional[float] = Field(None, gt=1.0)
    gamma_al: Optional[float] = Field(None, gt=0.0, lt=1.0)
    initial_penalty: float = Field(1.0, gt=0.0)
    initial_lambda: float = 0.0
    dag_threshold: float = Field(1e-8, gt=0.0)
    acyclicity: Literal["expm", "poly"] = "expm"
    poly_alpha: float = 1.0
    adjacency_lr_decay: float = Field(0.5, ge=0.0)
    min_adjacency_lr: float = Field(1e-7, gt=0.0)
    adjacency_init: float = Field(0.1, ge=0.0)
    edge_threshold: float = Field(0.3, ge=0.0)

    # latent heads
    latent_dim: int = Field(32, ge=1)
    kl_weight: float = Field(0.1, ge=0.0)
    n_mc: int = Field(1, ge=1)
    eval_mc: int = Field(25, ge=1)
    encoder_direction: Literal["forward", "backward"] = "forward"

    workers: int = Field(1, ge=1)

    @field_validator("split", mode="before")
    @classmethod
    def _parse_split(cls, value):
        if isinstance(value, str):
            return tuple(float(v) for v in value.replace(":", ",").split(","))
        return value

    @field_validator("arch")
    @classmethod
    def _known_arch(cls, value):
        from gnflow.flows import discover_architectures
        known = discover_architectures()
        if value not in known:
            raise ValueError(f"unknown architecture {value!r}, expected one of {known}")
        return value

    @field_validator("poly_alpha")
    @classmethod
    def _nonzero_alpha(cls, value):
        if value == 0:
            raise ValueError("poly_alpha must be nonzero")
        return value

    @model_validator(mode="after")
    def _check_split(self):
        if any(r < 0 for r in self.split) or abs(sum(self.split) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must be non-negative and sum to 1, got {self.split}")
        return self

    def al_hyperparameters(self) -> Tuple[float, float]:
        """(eta, gamma_al), falling back to the node-count table"""
        eta, gamma = al_defaults(self.nodes)
        return (self.eta if self.eta is not None else eta,
                self.gamma_al if self.gamma_al is not None else gamma)

    def adjacency_lr(self, penalty: float) -> float:
        """lr·(c/c₀)^(-adjacency_lr_decay), floored at min_adjacency_lr

        Adam steps are about lr per entry whatever the penalty, so with a
        fixed lr h(A) levels off near lr².
        """
        growth = max(penalty / self.initial_penalty, 1.0)
        return max(self.lr * growth ** -self.adjacency_lr_decay, self.min_adjacency_lr)

    def updated(self, **changes) -> "ExperimentConfig":
        """Validated copy with some fields replaced"""
        return build_config({**self.model_dump(), **changes})


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    """Validate a mapping into an ExperimentConfig, raising ConfigError"""
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid configuration: {problems}") from None


def load_preset(name_or_path: str) -> Dict[str, Any]:
    """Read a JSON preset by name (from the presets directory) or by path"""
    path = Path(name_or_path)
    if not path.suffix:
        path = PRESETS_DIR / f"{name_or_path}.json"
    if not path.exists():
        available = sorted(p.stem for p in PRESETS_DIR.glob("*.json"))
        raise ConfigError(f"preset not found: {name_or_path} (available: {available})")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            preset = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"preset {path} is not valid JSON: {e}") from None
    logger.debug(f"Loaded preset {path}")
    return preset


def read_config_file(path: str) -> Dict[str, Any]:
    """Parse a flat `key = value` file; blank lines and # comments are ignored"""
    if not Path(path).exists():
        raise ConfigError(f"config file not found: {path}")
    values = {k.strip(): v for k, v in dotenv_values(path).items() if v is not None}
    logger.debug(f"Read {len(values)} keys from {path}")
    return values


def load_config(preset: Optional[str] = None, config_file: Optional[str] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """Merge defaults, preset, config file and overrides (None values are skipped)"""
    merged: Dict[str, Any] = {}
    if preset:
        merged.update(load_preset(preset).get("config", {}))
    if config_file:
        merged.update(read_config_file(config_file))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "seed" not in merged and os.environ.get(SEED_ENV):
        merged["seed"] = os.environ[SEED_ENV]
    return build_config(merged)
