#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""GRU flow F = X + φ(t)·h¹(t, X) ⊙ h²(t, X̃)."""

import logging
from typing import Optional

import numpy as np
import torch
from torch import nn

from gnflow.diffcore import ops
from gnflow.flows.base import (DEFAULT_GCN_HIDDEN, DEFAULT_HIDDEN, DEFAULT_INIT_SCALE,
                               DEFAULT_LIPSCHITZ_BOUND, DEFAULT_MLP_LAYERS, GraphConditionedFlow,
                               check_gru_parameters)
from gnflow.flows.gcn import GcnEncoder
from gnflow.flows.mlp import MLP

logger = logging.getLogger("flows")

ARCHITECTURE = "gru"
DEFAULT_BETA = 1.0
DEFAULT_ALPHA = 2.0 / 11.0


class GruCellTerm(nn.Module):
    """h(t, Y) = z ⊙ (c − Y) with GRU-style reset/update gates"""

    def __init__(self, d: int, hidden: int, layers: int, alpha: float, beta: float,
                 rng: np.random.Generator, init_scale: float):
        super().__init__()
        self.alpha = alpha
        self.beta = beta
        self.f_z = MLP(d + 1, d, hidden, layers, rng, final_scale=init_scale)
        self.f_r = MLP(d + 1, d, hidden, layers, rng, final_scale=init_scale)
        self.f_c = MLP(d + 1, d, hidden, layers, rng, final_scale=init_scale)

    def forward(self, Y: torch.Tensor, column: torch.Tensor) -> torch.Tensor:
        r = self.beta * torch.sigmoid(self.f_r(ops.concat(Y, column)))
        z = self.alpha * torch.sigmoid(self.f_z(ops.concat(Y, column)))
        c = torch.tanh(self.f_c(ops.concat(r * Y, column)))
        return z * (c - Y)


class GruFlow(GraphConditionedFlow):
    arch = ARCHITECTURE

    def __init__(self, d: int, hidden: int = DEFAULT_HIDDEN, mlp_layers: int = DEFAULT_MLP_LAYERS,
                 gcn_hidden: int = DEFAULT_GCN_HIDDEN, use_graph: bool = True,
                 lipschitz_bound: float = DEFAULT_LIPSCHITZ_BOUND,
                 init_scale: float = DEFAULT_INIT_SCALE, rng: Optional[np.random.Generator] = None,
                 alpha: float = DEFAULT_ALPHA, beta: float = DEFAULT_BETA, strict: bool = True):
        super().__init__(d, hidden, use_graph, lipschitz_bound)
        if strict:
            check_gru_parameters(alpha, beta)
        elif alpha * (5.0 * beta + 6.0) > 2.0:
            logger.warning(f"GRU flow alpha={alpha}, beta={beta} outside the invertible range")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.alpha = alpha
        self.beta = beta
        self.strict = strict
        self.gcn = GcnEncoder(d, gcn_hidden, d, rng)
        self.h1 = GruCellTerm(d, hidden, mlp_layers, alpha, beta, rng, init_scale)
        self.h2 = GruCellTerm(d, hidden, mlp_layers, alpha, beta, rng, init_scale)

    def gate_product(self, t, X: torch.Tensor, a_hat: Optional[torch.Tensor]) -> torch.Tensor:
        """h¹(t, X) ⊙ h²(t, X̃), the term scaled by φ(t)"""
        column, _ = self.time_inputs(t, X)
        x_tilde = self.encode(self.gcn, a_hat, X)
        return self.h1(X, column) * self.h2(x_tilde, column)

    def forward(self, t, X: torch.Tensor, a_hat: Optional[torch.Tensor] = None) -> torch.Tensor:
        _, phi = self.time_inputs(t, X)
        return X + phi * self.gate_product(t, X, a_hat)

    def extra_meta(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "strict": self.strict}


FLOW_CLASS = GruFlow
