#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Diagonal Gaussians: reparameterized sampling, KL divergence and NLL."""

import math
from dataclasses import dataclass
from typing import Optional

import torch

from gnflow.errors import ShapeError

HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass
class GaussianParams:
    mu: torch.Tensor
    log_sigma: torch.Tensor

    def __post_init__(self):
        if self.mu.shape != self.log_sigma.shape:
            raise ShapeError("GaussianParams", self.mu.shape, self.log_sigma.shape)

    @property
    def sigma(self) -> torch.Tensor:
        return torch.exp(self.log_sigma)

    @classmethod
    def from_head(cls, output: torch.Tensor) -> "GaussianParams":
        """Split a head output [μ, log σ] along the last axis"""
        if output.shape[-1] % 2:
            raise ShapeError("GaussianParams.from_head", output.shape)
        mu, log_sigma = output.chunk(2, dim=-1)
        return cls(mu, log_sigma)

    @classmethod
    def standard(cls, like: torch.Tensor) -> "GaussianParams":
        return cls(torch.zeros_like(like), torch.zeros_like(like))

    def sample(self, eps: torch.Tensor) -> torch.Tensor:
        """z = μ + σ ⊙ ε"""
        return self.mu + self.sigma * eps


def gaussian_kl(q: GaussianParams, p: Optional[GaussianParams] = None) -> torch.Tensor:
    """Elementwise KL(q ‖ p); p defaults to the standard normal

    Written as ½(expm1(2δ) − 2δ) + (μq − μp)²/(2σp²) with δ = log σq − log σp,
    which is non-negative and exactly zero when q = p.
    """
    if p is None:
        p = GaussianParams.standard(q.mu)
    delta = q.log_sigma - p.log_sigma
    return 0.5 * (torch.expm1(2.0 * delta) - 2.0 * delta) + 0.5 * ((q.mu - p.mu) / p.sigma) ** 2


def gaussian_nll(x: torch.Tensor, g: GaussianParams) -> torch.Tensor:
    """Elementwise −log N(x | μ, σ²)"""
    return HALF_LOG_2PI + g.log_sigma + 0.5 * ((x - g.mu) / g.sigma) ** 2
