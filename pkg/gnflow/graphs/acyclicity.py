#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Smooth acyclicity functions h(A), zero exactly on DAG matrices."""

import torch

from gnflow.diffcore import matrix_exponential, ops
from gnflow.errors import ConfigError
from gnflow.graphs.dag import AdjacencyLike, _square


class _ExpmTrace(torch.autograd.Function):
    """tr(expm(A∘A)) - n with the closed-form gradient expm(A∘A)ᵀ ∘ 2A"""

    @staticmethod
    def forward(ctx, A):
        E = matrix_exponential(A * A)
        ctx.save_for_backward(A, E)
        return torch.trace(E) - A.shape[0]

    @staticmethod
    def backward(ctx, grad_out):
        A, E = ctx.saved_tensors
        return grad_out * E.T * 2.0 * A


def acyclicity_expm(A: AdjacencyLike) -> torch.Tensor:
    """h(A) = tr(expm(A∘A)) - n; differentiable, backward uses the closed form"""
    return _ExpmTrace.apply(_square("acyclicity_expm", A))


def grad_acyclicity_expm(A: AdjacencyLike) -> torch.Tensor:
    """∇h(A) = expm(A∘A)ᵀ ∘ 2A"""
    w = _square("grad_acyclicity_expm", A).detach()
    return matrix_exponential(w * w).T * 2.0 * w


def acyclicity_poly(A: AdjacencyLike, alpha: float = 1.0) -> torch.Tensor:
    """h(A) = tr((I + α·A∘A)ⁿ) - n; gradient through autograd"""
    if alpha == 0:
        raise ConfigError("acyclicity_poly requires alpha != 0")
    w = _square("acyclicity_poly", A)
    n = w.shape[0]
    M = torch.eye(n, dtype=w.dtype) + alpha * (w * w)
    return ops.trace(torch.linalg.matrix_power(M, n)) - n


def acyclicity(A: AdjacencyLike, kind: str = "expm", alpha: float = 1.0) -> torch.Tensor:
    """Dispatch on the configured acyclicity function"""
    if kind == "expm":
        return acyclicity_expm(A)
    if kind == "poly":
        return acyclicity_poly(A, alpha)
    raise ConfigError(f"unknown acyclicity function {kind!r}, expected one of ['expm', 'poly']")
