#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Two-layer bias-free GCN encoder X̃ = Â·relu(Â·X·W)·U."""

import math
from typing import Optional

import numpy as np
import torch
from torch import nn

from gnflow.diffcore import DTYPE, as_tensor, ops
from gnflow.errors import ShapeError
from gnflow.graphs import AdjacencyLike, normalize_adjacency


class GcnEncoder(nn.Module):
    """Bias-free two-layer graph convolution

    Args:
        in_dim: feature width d of X
        hidden: width h of the intermediate layer
        out_dim: output width d'
        rng: generator for the U(±1/√fan_in) initialization
    """

    def __init__(self, in_dim: int, hidden: int, out_dim: int, rng: Optional[np.random.Generator] = None):
        super().__init__()
        rng = rng if rng is not None else np.random.default_rng(0)
        self.W = nn.Parameter(torch.from_numpy(
            rng.uniform(-1.0, 1.0, size=(in_dim, hidden)) / math.sqrt(max(in_dim, 1))).to(DTYPE))
        self.U = nn.Parameter(torch.from_numpy(
            rng.uniform(-1.0, 1.0, size=(hidden, out_dim)) / math.sqrt(max(hidden, 1))).to(DTYPE))

    @property
    def out_dim(self) -> int:
        return self.U.shape[1]

    def forward(self, a_hat: torch.Tensor, X: torch.Tensor) -> torch.Tensor:
        """Encode X (..., n, d) with a normalized adjacency (..., n, n)"""
        if X.shape[-1] != self.W.shape[0] or X.shape[-2] != a_hat.shape[-1]:
            raise ShapeError("gcn_encode", a_hat.shape, X.shape, self.W.shape)
        hidden = torch.relu(ops.matmul(ops.matmul(a_hat, X), self.W))
        return ops.matmul(ops.matmul(a_hat, hidden), self.U)


def gcn_encode(A: AdjacencyLike, X: torch.Tensor, enc: GcnEncoder) -> torch.Tensor:
    """X̃ = Â·relu(Â·X·W)·U with Â = normalize_adjacency(A)"""
    a_hat = normalize_adjacency(A).a_hat
    return enc(a_hat, as_tensor(X))
