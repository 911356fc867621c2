#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Graph-conditioned affine coupling flow.

Each block keeps the V columns and maps the U columns as
Y_U = X_U·exp(φ(t)·u) + φ(t)·v, where u and v share the trunks
mlp1(X_V ‖ t) and mlp2(X̃_V ‖ t) and X̃_V = gcn(A, X_V). Consecutive blocks
swap U and V. Single-feature systems are lifted to two channels with a
zero column and the prediction is read from channel 0; their first block
conditions on channel 0 and writes the zero column, so with two or more
blocks channel 0 sees the graph.
"""

from typing import List, Optional, Tuple

import numpy as np
import torch
from torch import nn

from gnflow.diffcore import ops
from gnflow.errors import ShapeError
from gnflow.flows.base import (DEFAULT_GCN_HIDDEN, DEFAULT_HIDDEN, DEFAULT_INIT_SCALE,
                               DEFAULT_LIPSCHITZ_BOUND, GraphConditionedFlow, graph_features)
from gnflow.flows.gcn import GcnEncoder
from gnflow.flows.mlp import MLP

ARCHITECTURE = "coupling"
DEFAULT_BLOCKS = 2


def partition(width: int, block: int) -> Tuple[List[int], List[int]]:
    """(U, V) column split: even/odd columns, swapped on odd-numbered blocks"""
    even = list(range(0, width, 2))
    odd = list(range(1, width, 2))
    return (even, odd) if block % 2 == 0 else (odd, even)


class CouplingBlock(nn.Module):
    def __init__(self, use_graph: bool, u_cols: List[int], v_cols: List[int], hidden: int,
                 gcn_hidden: int, trunk_layers: int, head_layers: int,
                 rng: np.random.Generator, init_scale: float):
        super().__init__()
        self.use_graph = use_graph
        self.register_buffer("u_idx", torch.tensor(u_cols, dtype=torch.long))
        self.register_buffer("v_idx", torch.tensor(v_cols, dtype=torch.long))
        nu, nv = len(u_cols), len(v_cols)
        self.gcn = GcnEncoder(nv, gcn_hidden, nv, rng)
        self.mlp1 = MLP(nv + 1, hidden, hidden, trunk_layers - 1, rng, activate_output=True)
        self.mlp2 = MLP(nv + 1, hidden, hidden, trunk_layers - 1, rng, activate_output=True)
        self.mlp3 = MLP(2 * hidden, nu, hidden, head_layers - 1, rng, final_scale=init_scale)
        self.mlp4 = MLP(2 * hidden, nu, hidden, head_layers - 1, rng, final_scale=init_scale)

    def scale_shift(self, X: torch.Tensor, column: torch.Tensor, phi: torch.Tensor,
                    a_hat: Optional[torch.Tensor]) -> Tuple[torch.Tensor, torch.Tensor]:
        x_v = X.index_select(-1, self.v_idx)
        x_tilde_v = graph_features(self.gcn, a_hat, x_v, self.use_graph)
        trunk = ops.concat(self.mlp1(ops.concat(x_v, column)), self.mlp2(ops.concat(x_tilde_v, column)))
        return phi * self.mlp3(trunk), phi * self.mlp4(trunk)

    def forward(self, X, column, phi, a_hat):
        log_scale, shift = self.scale_shift(X, column, phi, a_hat)
        y_u = X.index_select(-1, self.u_idx) * torch.exp(log_scale) + shift
        return X.index_copy(X.ndim - 1, self.u_idx, y_u)

    def inverse(self, Y, column, phi, a_hat):
        log_scale, shift = self.scale_shift(Y, column, phi, a_hat)
        x_u = (Y.index_select(-1, self.u_idx) - shift) * torch.exp(-log_scale)
        return Y.index_copy(Y.ndim - 1, self.u_idx, x_u)


class CouplingFlow(GraphConditionedFlow):
    arch = ARCHITECTURE

    def __init__(self, d: int, hidden: int = DEFAULT_HIDDEN, mlp_layers: int = 1,
                 gcn_hidden: int = DEFAULT_GCN_HIDDEN, use_graph: bool = True,
                 lipschitz_bound: float = DEFAULT_LIPSCHITZ_BOUND,
                 init_scale: float = DEFAULT_INIT_SCALE, rng: Optional[np.random.Generator] = None,
                 blocks: int = DEFAULT_BLOCKS, trunk_layers: int = 1, head_layers: int = 1):
        super().__init__(d, hidden, use_graph, lipschitz_bound)
        rng = rng if rng is not None else np.random.default_rng(0)
        self.augmented = d == 1
        self.width = 2 if self.augmented else d
        self.trunk_layers = trunk_layers
        self.head_layers = head_layers
        # lifted inputs: the zero channel is written from (x, Ã·x) before channel 0 is mapped
        first = 1 if self.augmented else 0
        self.blocks = nn.ModuleList(
            CouplingBlock(use_graph, *partition(self.width, first + k), hidden, gcn_hidden,
                          trunk_layers, head_layers, rng, init_scale)
            for k in range(blocks)
        )

    def lift(self, X: torch.Tensor) -> torch.Tensor:
        """Append the zero channel for single-feature inputs"""
        if not self.augmented:
            return X
        return torch.cat([X, torch.zeros_like(X)], dim=-1)

    def _time_full(self, t, Y: torch.Tensor):
        if Y.shape[-1] != self.width:
            raise ShapeError("coupling_flow", Y.shape, (self.width,))
        return self.time_inputs(t, Y[..., :self.d])

    def forward_full(self, t, X: torch.Tensor, a_hat: Optional[torch.Tensor] = None) -> torch.Tensor:
        """Forward pass returning every channel of the (possibly lifted) space"""
        column, phi = self.time_inputs(t, X)
        Y = self.lift(X)
        for block in self.blocks:
            Y = block(Y, column, phi, a_hat)
        return Y

    def forward(self, t, X: torch.Tensor, a_hat: Optional[torch.Tensor] = None) -> torch.Tensor:
        Y = self.forward_full(t, X, a_hat)
        return Y[..., :self.d] if self.augmented else Y

    def inverse(self, t, Y: torch.Tensor, a_hat: Optional[torch.Tensor] = None) -> torch.Tensor:
        """Exact inverse of `forward_full`; Y has `width` channels"""
        column, phi = self._time_full(t, Y)
        X = Y
        for block in reversed(self.blocks):
            X = block.inverse(X, column, phi, a_hat)
        return X

    def extra_meta(self) -> dict:
        return {"blocks": len(self.blocks), "trunk_layers": self.trunk_layers,
                "head_layers": self.head_layers}


def invert_coupling(t, Y: torch.Tensor, a_hat: Optional[torch.Tensor], flow: CouplingFlow) -> torch.Tensor:
    """X with flow.forward_full(t, X, Â) = Y, block by block in reverse order"""
    return flow.inverse(t, Y, a_hat)


FLOW_CLASS = CouplingFlow
