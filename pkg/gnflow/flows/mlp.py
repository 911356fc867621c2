#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Row-wise multilayer perceptron with seeded initialization."""

import math
from typing import Iterator, Optional

import numpy as np
import torch
from torch import nn

from gnflow.diffcore import DTYPE


def init_linear(layer: nn.Linear, rng: np.random.Generator, scale: float = 1.0) -> nn.Linear:
    """Fill a linear layer with U(±scale/√fan_in) draws from `rng`"""
    fan_in = layer.in_features
    bound = scale / math.sqrt(fan_in) if fan_in else 0.0
    with torch.no_grad():
        layer.weight.copy_(torch.from_numpy(rng.uniform(-bound, bound, size=tuple(layer.weight.shape))))
        if layer.bias is not None:
            layer.bias.copy_(torch.from_numpy(rng.uniform(-bound, bound, size=tuple(layer.bias.shape))))
    return layer


class MLP(nn.Module):
    """tanh MLP acting on the last axis

    `layers` hidden layers of width `hidden` (each with bias and tanh), then
    a bias-free output layer. With `activate_output` the output layer keeps
    its bias and is followed by tanh as well (used for shared trunks).
    """

    def __init__(self, in_dim: int, out_dim: int, hidden: int = 64, layers: int = 2,
                 rng: Optional[np.random.Generator] = None, final_scale: float = 1.0,
                 activate_output: bool = False):
        super().__init__()
        rng = rng if rng is not None else np.random.default_rng(0)
        widths = [in_dim] + [hidden] * layers
        self.hidden_layers = nn.ModuleList(
            init_linear(nn.Linear(a, b, bias=True, dtype=DTYPE), rng)
            for a, b in zip(widths[:-1], widths[1:])
        )
        self.out = init_linear(
            nn.Linear(widths[-1], out_dim, bias=activate_output, dtype=DTYPE), rng, final_scale
        )
        self.activate_output = activate_output
        self.in_dim = in_dim
        self.out_dim = out_dim

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        for layer in self.hidden_layers:
            x = torch.tanh(layer(x))
        x = self.out(x)
        return torch.tanh(x) if self.activate_output else x

    def linears(self) -> Iterator[nn.Linear]:
        yield from self.hidden_layers
        yield self.out
