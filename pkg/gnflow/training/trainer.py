#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Augmented-Lagrangian training loop.

Each outer iteration k minimizes L + λh + (c/2)h² with Adam and early
stopping on the validation loss, then updates λ ← λ + c·h(Aᵏ) and grows c
by η when h did not shrink by the factor γ_al. Only a learned adjacency runs
more than one outer iteration; each one after the first starts from fresh
Adam moments with the adjacency step size shrunk as c grows.
"""

import copy
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
import torch
from torch import nn

from gnflow.diffcore import ParamStore, adam_step, grad, make_rng
from gnflow.dynamics import TrajectoryBatch
from gnflow.errors import NumericalError, TrainingDiverged
from gnflow.flows import enforce_contraction
from gnflow.graphs import AdjacencyLike, DagMatrix
from gnflow.training.config import ExperimentConfig
from gnflow.training.factory import build_model
from gnflow.training.losses import augmented_loss
from gnflow.training.state import TrainState

logger = logging.getLogger("training")

HISTORY_COLUMNS = ["epoch", "outer", "train_loss", "val_loss", "h_A", "lambda", "c", "seconds"]
SHUFFLE_STREAM = 12
ADJACENCY_PARAM = "adjacency.weight"


@dataclass
class TrainingResult:
    model: nn.Module
    dag: DagMatrix
    state: TrainState
    history: List[Dict[str, Any]] = field(default_factory=list)

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.history, columns=HISTORY_COLUMNS)

    @property
    def h_final(self) -> float:
        return float(self.model.adjacency.constraint().detach())

    @property
    def seconds_per_epoch(self) -> float:
        if not self.history:
            return 0.0
        return sum(row["seconds"] for row in self.history) / len(self.history)


def write_history(path, history: List[Dict[str, Any]]) -> None:
    frame = pd.DataFrame(history, columns=HISTORY_COLUMNS)
    frame.to_csv(path, index=False, float_format="%.10g")


def _validation_loss(model: nn.Module, val: TrajectoryBatch) -> float:
    with torch.no_grad():
        return float(model.evaluation_loss(val))


def train_gneuralflow(config: ExperimentConfig, data: Tuple[TrajectoryBatch, TrajectoryBatch],
                      model: Optional[nn.Module] = None,
                      initial_adjacency: Optional[AdjacencyLike] = None) -> TrainingResult:
    """Train a model on (train, validation) batches

    Args:
        config: experiment configuration
        data: the materialized train and validation splits
        model: an existing model to continue from; built from config when None
        initial_adjacency: start value for a learned A (e.g. a perturbed truth)

    Returns:
        TrainingResult with the best-validation parameters restored
    """
    train, val = data
    if model is None:
        model = build_model(config, train.n, train.d, truth=train.adjacency, initial=initial_adjacency)
    eta, gamma_al = config.al_hyperparameters()
    state = TrainState(eta, gamma_al, lam=config.initial_lambda, penalty=config.initial_penalty,
                       dag_threshold=config.dag_threshold)
    history: List[Dict[str, Any]] = []
    holder = model.adjacency

    if config.epochs == 0:
        logger.info("epochs=0, returning the untrained model")
        return TrainingResult(model, holder.dag(), state, history)

    params = ParamStore.from_module(model, lr=config.lr)
    shuffle = make_rng(config.seed, SHUFFLE_STREAM)
    outer_budget = config.outer_iterations if holder.learned else 1
    epoch_counter = 0

    for k in range(outer_budget):
        if k > 0:
            params.reset_moments()
            if ADJACENCY_PARAM in params.params:
                params.set_lr(config.adjacency_lr(state.penalty), [ADJACENCY_PARAM])
                logger.debug(f"outer {k}: adjacency lr {params.lr_of(ADJACENCY_PARAM):.3g}")
        best_val = math.inf
        best_params = copy.deepcopy(model.state_dict())
        stale = 0
        for epoch in range(config.epochs):
            started = time.perf_counter()
            losses = []
            for mb in train.batches(config.batch_size, shuffle):
                try:
                    loss = augmented_loss(model, mb, state)
                    adam_step(params, grad(loss, params))
                except NumericalError as e:
                    raise TrainingDiverged(f"training diverged at outer {k}, epoch {epoch}: {e}", history) from e
                if holder.learned:
                    holder.zero_diagonal_()
                if config.contraction:
                    enforce_contraction(model, config.lipschitz_bound)
                losses.append(float(loss.detach()))
            val_loss = _validation_loss(model, val)
            seconds = time.perf_counter() - started
            h_value = float(holder.constraint().detach())
            row = {
                "epoch": epoch_counter, "outer": k, "train_loss": sum(losses) / len(losses),
                "val_loss": val_loss, "h_A": h_value, "lambda": state.lam, "c": state.penalty,
                "seconds": seconds,
            }
            history.append(row)
            epoch_counter += 1
            logger.debug(f"outer {k} epoch {epoch}: train={row['train_loss']:.6g} val={val_loss:.6g} h={h_value:.3e}")
            if not (math.isfinite(val_loss) and math.isfinite(row["train_loss"])):
                logger.error(f"Non-finite loss at outer {k}, epoch {epoch}")
                raise TrainingDiverged(f"non-finite loss at outer {k}, epoch {epoch}", history)
            if val_loss < best_val:
                best_val = val_loss
                best_params = copy.deepcopy(model.state_dict())
                stale = 0
            else:
                stale += 1
                if stale >= config.patience:
                    logger.debug(f"early stop at epoch {epoch} (best val {best_val:.6g})")
                    break
        model.load_state_dict(best_params)

        h_value = float(holder.constraint().detach())
        state.update(h_value)
        logger.info(f"outer {k}: h(A)={h_value:.3e} lambda={state.lam:.4g} c={state.penalty:.4g} "
                    f"best_val={best_val:.6g}")
        if state.converged(h_value):
            break

    return TrainingResult(model, holder.dag(), state, history)
