#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Matrix exponential and spectral-norm control."""

import math

import torch

from gnflow.diffcore.rng import make_rng
from gnflow.diffcore.tensor import ArrayLike, as_tensor
from gnflow.errors import ConfigError, ShapeError

TAYLOR_TERMS = 18
SCALED_NORM = 0.5


def matrix_exponential(M: ArrayLike, terms: int = TAYLOR_TERMS) -> torch.Tensor:
    """expm(M) by scaling and squaring

    M is scaled by 2^-k until its 1-norm is at most 0.5, the truncated Taylor
    series is evaluated in Horner form, and the result is squared k times.
    Differentiable through torch autograd.
    """
    M = as_tensor(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError("matrix_exponential", M.shape)
    n = M.shape[0]
    eye = torch.eye(n, dtype=M.dtype)
    norm1 = float(M.detach().abs().sum(dim=0).max()) if n else 0.0
    k = 0
    if norm1 > SCALED_NORM:
        k = int(math.ceil(math.log2(norm1 / SCALED_NORM)))
    S = M / (2.0 ** k)
    E = eye
    for j in range(terms, 0, -1):
        E = eye + (S @ E) / j
    for _ in range(k):
        E = E @ E
    return E


def _start_vector(cols: int) -> torch.Tensor:
    v = torch.from_numpy(make_rng(0, cols).standard_normal(cols))
    return v / torch.linalg.vector_norm(v)


def spectral_norm(M: ArrayLike, iters: int = 100) -> float:
    """Largest singular value by power iteration on MᵀM"""
    with torch.no_grad():
        M = as_tensor(M).detach()
        if M.ndim != 2:
            raise ShapeError("spectral_norm", M.shape)
        if M.numel() == 0 or not bool(M.any()):
            return 0.0
        v = _start_vector(M.shape[1])
        prev = -1.0
        for _ in range(max(1, iters)):
            w = M.T @ (M @ v)
            nrm = float(torch.linalg.vector_norm(w))
            if nrm == 0.0:
                return 0.0
            v = w / nrm
            if abs(nrm - prev) <= 1e-15 * nrm:
                break
            prev = nrm
        return float(torch.linalg.vector_norm(M @ v))


def clip_spectral(M: ArrayLike, bound: float, iters: int = 100) -> torch.Tensor:
    """Rescale M so its spectral norm does not exceed `bound`

    Matrices already within the bound (up to a 1e-12 relative margin) are
    returned untouched, which makes clipping idempotent.
    """
    if not bound > 0:
        raise ConfigError(f"spectral bound must be positive, got {bound}")
    M = as_tensor(M)
    sigma = spectral_norm(M, iters)
    if sigma <= bound * (1.0 + 1e-12):
        return M
    return M * (bound / sigma)
