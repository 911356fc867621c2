#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Paired hidden states and the flow-based evolution between observations."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
from torch import nn

from gnflow.diffcore import as_tensor, ops
from gnflow.errors import ConfigError, ShapeError


@dataclass
class HiddenStatePair:
    """H and the graph-informed H̃ (None when the graph branch is ablated)

    C and C_tilde hold LSTM cell states for the smoothing encoder.
    """

    H: torch.Tensor
    H_tilde: Optional[torch.Tensor] = None
    C: Optional[torch.Tensor] = None
    C_tilde: Optional[torch.Tensor] = None

    def __post_init__(self):
        if self.H_tilde is not None and self.H_tilde.shape != self.H.shape:
            raise ShapeError("HiddenStatePair", self.H.shape, self.H_tilde.shape)

    @classmethod
    def zeros(cls, S: int, n: int, h: int, paired: bool = True, cells: bool = False) -> "HiddenStatePair":
        z = lambda: torch.zeros(S, n, h, dtype=torch.float64)
        return cls(z(), z() if paired else None, z() if cells else None,
                   z() if (cells and paired) else None)

    def joined(self) -> torch.Tensor:
        return self.H if self.H_tilde is None else ops.concat(self.H, self.H_tilde)


def evolve_hidden(pair: HiddenStatePair, t_prev, t_next, flow: nn.Module, g_proj: nn.Module) -> torch.Tensor:
    """H' = g_proj(F(t_next − t_prev, H ‖ H̃))

    Args:
        pair: hidden states (S, n, h)
        t_prev, t_next: scalars or (S,) times with t_next >= t_prev
        flow: non-graph flow over the concatenated width
        g_proj: projection back to width h

    Returns:
        H' of shape (S, n, h)
    """
    elapsed = as_tensor(t_next) - as_tensor(t_prev)
    if bool((elapsed < 0).any()):
        raise ConfigError("evolve_hidden needs t_next >= t_prev")
    evolved = flow(elapsed, pair.joined(), None)
    return g_proj(evolved)


def init_recurrent(cell: nn.Module, rng: np.random.Generator) -> nn.Module:
    """U(±1/√hidden) initialization of an LSTM/GRU cell from a seeded generator"""
    bound = 1.0 / math.sqrt(cell.hidden_size)
    with torch.no_grad():
        for param in cell.parameters():
            param.copy_(torch.from_numpy(rng.uniform(-bound, bound, size=tuple(param.shape))))
    return cell


def apply_rowwise(cell: nn.Module, inputs: torch.Tensor, state):
    """Run a recurrent cell over (S, n, ·) by flattening nodes into the batch"""
    S, n = inputs.shape[:2]
    flat = inputs.reshape(S * n, -1)
    if isinstance(state, tuple):
        h, c = cell(flat, tuple(s.reshape(S * n, -1) for s in state))
        return h.reshape(S, n, -1), c.reshape(S, n, -1)
    return cell(flat, state.reshape(S * n, -1)).reshape(S, n, -1)
