#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Dense float64 tensors and the checked forward ops used across gnflow.

Tensors are torch tensors in float64; every op below records its autograd
graph through torch so reverse-mode gradients come for free. The wrappers
only add shape validation with both operand shapes in the error.
"""

from typing import Sequence, Union

import numpy as np
import torch

from gnflow.errors import ShapeError

DTYPE = torch.float64

ArrayLike = Union[torch.Tensor, np.ndarray, Sequence, float, int]


def as_tensor(x: ArrayLike) -> torch.Tensor:
    """Convert to a float64 tensor without copying when already one"""
    if isinstance(x, torch.Tensor):
        return x if x.dtype == DTYPE else x.to(DTYPE)
    return torch.as_tensor(np.asarray(x, dtype=np.float64))


def _broadcast(op: str, a: torch.Tensor, b: torch.Tensor):
    try:
        return torch.broadcast_shapes(a.shape, b.shape)
    except RuntimeError:
        raise ShapeError(op, a.shape, b.shape) from None


def matmul(a: ArrayLike, b: ArrayLike) -> torch.Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError("matmul", a.shape, b.shape)
    try:
        torch.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except RuntimeError:
        raise ShapeError("matmul", a.shape, b.shape) from None
    return a @ b


def add(a: ArrayLike, b: ArrayLike) -> torch.Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast("add", a, b)
    return a + b


def mul(a: ArrayLike, b: ArrayLike) -> torch.Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast("mul", a, b)
    return a * b


def concat(*parts: ArrayLike) -> torch.Tensor:
    """Concatenate along the feature (last) axis, broadcasting leading axes"""
    tensors = [as_tensor(p) for p in parts]
    for t in tensors:
        if t.ndim == 0:
            raise ShapeError("concat", *[p.shape for p in tensors])
    try:
        lead = torch.broadcast_shapes(*[t.shape[:-1] for t in tensors])
    except RuntimeError:
        raise ShapeError("concat", *[t.shape for t in tensors]) from None
    return torch.cat([t.expand(*lead, t.shape[-1]) for t in tensors], dim=-1)


def transpose(a: ArrayLike) -> torch.Tensor:
    a = as_tensor(a)
    if a.ndim < 2:
        raise ShapeError("transpose", a.shape)
    return a.transpose(-2, -1)


def relu(a: ArrayLike) -> torch.Tensor:
    return torch.relu(as_tensor(a))


def tanh(a: ArrayLike) -> torch.Tensor:
    return torch.tanh(as_tensor(a))


def sigmoid(a: ArrayLike) -> torch.Tensor:
    return torch.sigmoid(as_tensor(a))


def exp(a: ArrayLike) -> torch.Tensor:
    return torch.exp(as_tensor(a))


def floor(a: ArrayLike) -> torch.Tensor:
    return torch.floor(as_tensor(a))


def sign(a: ArrayLike) -> torch.Tensor:
    return torch.sign(as_tensor(a))


def trace(a: ArrayLike) -> torch.Tensor:
    a = as_tensor(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("trace", a.shape)
    return torch.trace(a)
