#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Build models from a config, and rebuild them from checkpoints."""

import logging
from typing import Optional, Tuple

import numpy as np
import torch
from torch import nn

from gnflow.diffcore import make_rng
from gnflow.errors import ConfigError, DataError
from gnflow.flows import AdjacencyHolder, GraphConditionedFlow, GraphFlow, get_architecture
from gnflow.flows.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from gnflow.graphs import AdjacencyLike, adjacency_tensor
from gnflow.training.config import ExperimentConfig, build_config
from gnflow.utils.textio import PathLike

logger = logging.getLogger("training")

# rng stream ids under the config seed
MODEL_STREAM = 10
ADJACENCY_STREAM = 11


def flow_kwargs(config: ExperimentConfig, arch: str) -> dict:
    common = dict(hidden=config.hidden, gcn_hidden=config.gcn_hidden,
                  lipschitz_bound=config.lipschitz_bound, init_scale=config.init_scale)
    if arch == "coupling":
        return dict(common, blocks=config.coupling_blocks, trunk_layers=config.trunk_layers,
                    head_layers=config.head_layers)
    common["mlp_layers"] = config.mlp_layers
    if arch == "gru":
        common.update(alpha=config.alpha, beta=config.beta, strict=config.strict_invertibility)
    return common


def build_flow(config: ExperimentConfig, d: int, use_graph: bool,
               rng: Optional[np.random.Generator] = None, arch: Optional[str] = None) -> GraphConditionedFlow:
    """Instantiate the configured flow architecture over d features"""
    arch = arch or config.arch
    flow_class = get_architecture(arch)
    rng = rng if rng is not None else make_rng(config.seed, MODEL_STREAM)
    return flow_class(d, use_graph=use_graph, rng=rng, **flow_kwargs(config, arch))


def initial_adjacency(config: ExperimentConfig, n: int) -> torch.Tensor:
    """Small N(0, adjacency_init²) off-diagonal start for a learned A"""
    noise = make_rng(config.seed, ADJACENCY_STREAM).normal(0.0, config.adjacency_init, size=(n, n))
    np.fill_diagonal(noise, 0.0)
    return torch.from_numpy(noise)


def build_adjacency(config: ExperimentConfig, n: int, truth: Optional[AdjacencyLike] = None,
                    initial: Optional[AdjacencyLike] = None) -> AdjacencyHolder:
    if config.graph == "truth":
        if truth is None:
            raise ConfigError("graph mode 'truth' needs a ground-truth DAG")
        start = truth
    elif config.graph == "learned":
        start = initial if initial is not None else initial_adjacency(config, n)
    else:
        start = None
    if start is not None and adjacency_tensor(start).shape != (n, n):
        raise ConfigError(f"adjacency must be {n}x{n}, got {tuple(adjacency_tensor(start).shape)}")
    return AdjacencyHolder(n, config.graph, start, config.acyclicity, config.poly_alpha)


def build_model(config: ExperimentConfig, n: int, d: int, truth: Optional[AdjacencyLike] = None,
                initial: Optional[AdjacencyLike] = None) -> nn.Module:
    """Model for config.task: GraphFlow, LatentSmoother or LatentFilter"""
    adjacency = build_adjacency(config, n, truth, initial)
    rng = make_rng(config.seed, MODEL_STREAM)
    if config.task == "forecast":
        return GraphFlow(build_flow(config, d, adjacency.use_graph, rng), adjacency)

    from gnflow.latent import LatentFilter, LatentSmoother
    model_class = LatentSmoother if config.task == "smoothing" else LatentFilter
    return model_class(config, n, d, adjacency, rng)


def checkpoint_of(model: nn.Module, config: ExperimentConfig) -> Checkpoint:
    meta = {"task": config.task, "graph": config.graph, "config": config.model_dump(mode="json")}
    return Checkpoint(config.arch, model.n, model.d, config.hidden, meta, model.state_dict())


def save_model(path: PathLike, model: nn.Module, config: ExperimentConfig) -> None:
    save_checkpoint(path, checkpoint_of(model, config))


def model_from_checkpoint(path: PathLike) -> Tuple[nn.Module, ExperimentConfig]:
    """Rebuild a model and its config from a checkpoint file"""
    ckpt = load_checkpoint(path)
    if "config" not in ckpt.meta:
        raise DataError(f"{path}: checkpoint meta has no config")
    config = build_config(ckpt.meta["config"])
    if config.arch != ckpt.arch:
        raise DataError(f"{path}: header arch {ckpt.arch} disagrees with meta arch {config.arch}")
    placeholder = ckpt.tensors.get("adjacency.weight")
    model = build_model(config, ckpt.n, ckpt.d, truth=placeholder, initial=placeholder)
    try:
        model.load_state_dict(ckpt.tensors, strict=True)
    except RuntimeError as e:
        raise DataError(f"{path}: checkpoint tensors do not match the model: {e}") from None
    logger.info(f"Loaded {config.task} model ({config.arch}, graph={config.graph}) from {path}")
    return model, config
