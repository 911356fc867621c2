#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""SEM-style adjacency normalization Â = I - Aᵀ/γ and node masking."""

from dataclasses import dataclass
from typing import Optional

import torch

from gnflow.graphs.dag import AdjacencyLike, _square


@dataclass
class NormalizedAdjacency:
    a_hat: torch.Tensor
    gamma: torch.Tensor

    @property
    def gamma_value(self) -> float:
        return float(self.gamma.detach())


def normalize_adjacency(A: AdjacencyLike) -> NormalizedAdjacency:
    """Â = I - Aᵀ/γ with γ = maxⱼ Σ_{i≠j} |Bᵢⱼ|, B = A + Aᵀ

    The empty graph (γ = 0) maps to Â = I. ‖Â‖₂ ≤ 2 whenever A is a DAG.
    """
    w = _square("normalize_adjacency", A)
    n = w.shape[0]
    eye = torch.eye(n, dtype=w.dtype)
    B = w + w.T
    gamma = (B.abs() * (1.0 - eye)).sum(dim=0).max() if n else torch.zeros((), dtype=w.dtype)
    if float(gamma.detach()) == 0.0:
        return NormalizedAdjacency(eye, torch.zeros((), dtype=w.dtype))
    return NormalizedAdjacency(eye - w.T / gamma, gamma)


def mask_adjacency(a_hat: torch.Tensor, node_mask: Optional[torch.Tensor]) -> torch.Tensor:
    """Zero the rows and columns of Â belonging to absent nodes

    Args:
        a_hat: n×n normalized adjacency
        node_mask: (..., n) presence flags, None for all present

    Returns:
        (..., n, n) masked matrix, or a_hat itself when node_mask is None
    """
    if node_mask is None:
        return a_hat
    m = node_mask.to(a_hat.dtype)
    return a_hat * m.unsqueeze(-1) * m.unsqueeze(-2)
