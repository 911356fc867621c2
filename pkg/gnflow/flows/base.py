#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Shared pieces of the graph-conditioned flows F(t, X, A)."""

import math
from typing import Optional, Tuple

import torch
from torch import nn

from gnflow.diffcore import as_tensor
from gnflow.errors import ConfigError, ShapeError

DEFAULT_HIDDEN = 64
DEFAULT_MLP_LAYERS = 2
DEFAULT_GCN_HIDDEN = 16
DEFAULT_LIPSCHITZ_BOUND = 0.9
DEFAULT_INIT_SCALE = 0.1


def graph_features(gcn: nn.Module, a_hat: Optional[torch.Tensor], X: torch.Tensor,
                   use_graph: bool = True) -> torch.Tensor:
    """GCN output, or zeros of the same shape when the graph branch is off"""
    if not use_graph or a_hat is None:
        return torch.zeros(*X.shape[:-1], gcn.out_dim, dtype=X.dtype)
    return gcn(a_hat, X)


class GraphConditionedFlow(nn.Module):
    """Base class: F(t, X, Â) with F(0, X, Â) = X

    Subclasses implement `forward(t, X, a_hat)` where X is (..., n, d),
    t is a scalar or broadcastable to X.shape[:-2] and a_hat is a normalized
    adjacency (n, n) or (..., n, n). When `use_graph` is False the GCN path
    is skipped and X̃ is zero (the non-graph neural-flow baseline).
    """

    arch = ""

    def __init__(self, d: int, hidden: int = DEFAULT_HIDDEN, use_graph: bool = True,
                 lipschitz_bound: float = DEFAULT_LIPSCHITZ_BOUND):
        super().__init__()
        if d < 1:
            raise ConfigError(f"feature dimension must be >= 1, got {d}")
        if hidden < 1:
            raise ConfigError(f"hidden width must be >= 1, got {hidden}")
        if not 0.0 < lipschitz_bound < 1.0:
            raise ConfigError(f"lipschitz_bound must be in (0, 1), got {lipschitz_bound}")
        self.d = d
        self.hidden = hidden
        self.use_graph = use_graph
        self.lipschitz_bound = lipschitz_bound

    def time_inputs(self, t, X: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """Validate t and return (time column (..., n, 1), φ(t) = tanh(t) shaped (..., 1, 1))"""
        if X.ndim < 2 or X.shape[-1] != self.d:
            raise ShapeError(f"{self.arch}_flow", X.shape, (self.d,))
        t = as_tensor(t).detach()
        if not bool(torch.isfinite(t).all()):
            raise ConfigError(f"{self.arch}_flow: time must be finite")
        if bool((t < 0).any()):
            raise ConfigError(f"{self.arch}_flow: time must be >= 0, got min {float(t.min())}")
        lead = X.shape[:-2]
        try:
            t = t.expand(lead) if t.ndim == 0 else t.expand(torch.broadcast_shapes(t.shape, lead))
        except RuntimeError:
            raise ShapeError(f"{self.arch}_flow", t.shape, X.shape) from None
        t = t[..., None, None]
        column = t.expand(*t.shape[:-2], X.shape[-2], 1)
        return column, torch.tanh(t)

    def encode(self, gcn: nn.Module, a_hat: Optional[torch.Tensor], X: torch.Tensor) -> torch.Tensor:
        return graph_features(gcn, a_hat, X, self.use_graph)

    def extra_meta(self) -> dict:
        """Constructor settings beyond the common ones, stored in checkpoints"""
        return {}


def check_gru_parameters(alpha: float, beta: float) -> float:
    """α(5β + 6), rejected above 2 (the invertibility condition of the GRU flow)"""
    if not (math.isfinite(alpha) and math.isfinite(beta)) or alpha <= 0 or beta <= 0:
        raise ConfigError(f"GRU flow needs positive finite alpha/beta, got {alpha}, {beta}")
    value = alpha * (5.0 * beta + 6.0)
    if value > 2.0 + 1e-12:
        raise ConfigError(f"GRU flow not invertible: alpha*(5*beta+6) = {value:.6g} > 2")
    return value
