#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""ResNet flow F = X + φ(t)·MLP¹(X ‖ X̃ ‖ t) ⊙ MLP²(X ‖ t)."""

from typing import Optional

import numpy as np
import torch

from gnflow.diffcore import ops
from gnflow.flows.base import (DEFAULT_GCN_HIDDEN, DEFAULT_HIDDEN, DEFAULT_INIT_SCALE,
                               DEFAULT_LIPSCHITZ_BOUND, DEFAULT_MLP_LAYERS, GraphConditionedFlow)
from gnflow.flows.gcn import GcnEncoder
from gnflow.flows.mlp import MLP

ARCHITECTURE = "resnet"


class ResnetFlow(GraphConditionedFlow):
    arch = ARCHITECTURE

    def __init__(self, d: int, hidden: int = DEFAULT_HIDDEN, mlp_layers: int = DEFAULT_MLP_LAYERS,
                 gcn_hidden: int = DEFAULT_GCN_HIDDEN, use_graph: bool = True,
                 lipschitz_bound: float = DEFAULT_LIPSCHITZ_BOUND,
                 init_scale: float = DEFAULT_INIT_SCALE, rng: Optional[np.random.Generator] = None):
        super().__init__(d, hidden, use_graph, lipschitz_bound)
        rng = rng if rng is not None else np.random.default_rng(0)
        self.gcn = GcnEncoder(d, gcn_hidden, d, rng)
        self.mlp1 = MLP(2 * d + 1, d, hidden, mlp_layers, rng, final_scale=init_scale)
        self.mlp2 = MLP(d + 1, d, hidden, mlp_layers, rng, final_scale=init_scale)

    def residual(self, t, X: torch.Tensor, a_hat: Optional[torch.Tensor]) -> torch.Tensor:
        """g(t, X, A) before the φ(t) factor"""
        column, _ = self.time_inputs(t, X)
        x_tilde = self.encode(self.gcn, a_hat, X)
        return self.mlp1(ops.concat(X, x_tilde, column)) * self.mlp2(ops.concat(X, column))

    def forward(self, t, X: torch.Tensor, a_hat: Optional[torch.Tensor] = None) -> torch.Tensor:
        _, phi = self.time_inputs(t, X)
        return X + phi * self.residual(t, X, a_hat)


FLOW_CLASS = ResnetFlow
