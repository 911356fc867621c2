#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Flow plus adjacency: the trainable forecasting model."""

from typing import Optional

import torch
from torch import nn

from gnflow.diffcore import as_tensor
from gnflow.errors import ConfigError, ShapeError
from gnflow.graphs import DagMatrix, acyclicity, adjacency_tensor, mask_adjacency, normalize_adjacency
from gnflow.flows.base import GraphConditionedFlow

GRAPH_MODES = ("learned", "truth", "none")


class AdjacencyHolder(nn.Module):
    """The adjacency A seen by a model

    learned: a trainable parameter with its diagonal kept at zero
    truth:   a frozen buffer (usually the generating DAG)
    none:    a frozen zero matrix; the graph branch is disabled
    """

    def __init__(self, n: int, mode: str = "learned", initial=None,
                 acyclicity_kind: str = "expm", poly_alpha: float = 1.0):
        super().__init__()
        if mode not in GRAPH_MODES:
            raise ConfigError(f"unknown graph mode {mode!r}, expected one of {list(GRAPH_MODES)}")
        if initial is None or mode == "none":
            weights = torch.zeros(n, n, dtype=torch.float64)
        else:
            weights = adjacency_tensor(initial).detach().clone()
        if weights.shape != (n, n):
            raise ShapeError("AdjacencyHolder", weights.shape, (n, n))
        weights.fill_diagonal_(0.0)
        self.mode = mode
        self.n = n
        self.acyclicity_kind = acyclicity_kind
        self.poly_alpha = poly_alpha
        if mode == "learned":
            self.weight = nn.Parameter(weights)
        else:
            self.register_buffer("weight", weights)

    @property
    def learned(self) -> bool:
        return self.mode == "learned"

    @property
    def use_graph(self) -> bool:
        return self.mode != "none"

    def zero_diagonal_(self) -> None:
        with torch.no_grad():
            self.weight.fill_diagonal_(0.0)

    def constraint(self) -> torch.Tensor:
        """h(A) for a learned adjacency; a constant zero otherwise"""
        if not self.learned:
            return torch.zeros((), dtype=torch.float64)
        return acyclicity(self.weight, self.acyclicity_kind, self.poly_alpha)

    def a_hat(self, node_mask: Optional[torch.Tensor] = None) -> Optional[torch.Tensor]:
        if not self.use_graph:
            return None
        return mask_adjacency(normalize_adjacency(self.weight).a_hat, node_mask)

    def dag(self) -> DagMatrix:
        return DagMatrix(self.weight.detach().clone())


class GraphFlow(nn.Module):
    """A graph-conditioned flow evaluated from initial conditions

    forward(times (S, N), X0 (S, n, d), mask (S, N, n)) -> (S, N, n, d)
    """

    task = "forecast"

    def __init__(self, flow: GraphConditionedFlow, adjacency: AdjacencyHolder):
        super().__init__()
        if flow.use_graph != adjacency.use_graph:
            raise ConfigError("flow.use_graph must match the adjacency mode")
        self.flow = flow
        self.adjacency = adjacency

    @property
    def n(self) -> int:
        return self.adjacency.n

    @property
    def d(self) -> int:
        return self.flow.d

    def forward(self, times, X0: torch.Tensor, mask: Optional[torch.Tensor] = None) -> torch.Tensor:
        times = as_tensor(times)
        X0 = as_tensor(X0)
        if X0.ndim != 3 or times.ndim != 2 or times.shape[0] != X0.shape[0]:
            raise ShapeError("GraphFlow", times.shape, X0.shape)
        S, N = times.shape
        X = X0[:, None].expand(S, N, *X0.shape[1:])
        a_hat = self.adjacency.a_hat(mask)
        return self.flow(times, X, a_hat)

    def predict(self, batch) -> torch.Tensor:
        return self(batch.times, batch.initial, batch.mask)

    def task_loss(self, batch) -> torch.Tensor:
        from gnflow.training.losses import mse_loss
        return mse_loss(self.predict(batch), batch.values, batch.mask)

    def evaluation_loss(self, batch) -> torch.Tensor:
        return self.task_loss(batch)
