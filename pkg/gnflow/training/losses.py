#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Masked regression loss and the augmented Lagrangian."""

import logging
from typing import Optional

import torch

from gnflow.errors import DataError, NumericalError, ShapeError
from gnflow.training.state import TrainState

logger = logging.getLogger("training")


def expand_mask(mask: torch.Tensor, like: torch.Tensor) -> torch.Tensor:
    """Node mask (..., n) broadcast to values (..., n, d)"""
    m = mask.to(torch.bool)
    if m.shape != like.shape[:-1]:
        raise ShapeError("mask", m.shape, like.shape)
    return m[..., None].expand(like.shape)


def mse_loss(pred: torch.Tensor, target: torch.Tensor, mask: Optional[torch.Tensor] = None) -> torch.Tensor:
    """Mean squared error over observed entries only

    Masked positions contribute neither to the value nor to the gradient.
    """
    if pred.shape != target.shape:
        raise ShapeError("mse_loss", pred.shape, target.shape)
    if mask is None:
        return ((pred - target) ** 2).mean()
    m = expand_mask(mask, pred)
    count = int(m.sum())
    if count == 0:
        raise DataError("mse_loss: mask selects no entries")
    diff = torch.where(m, pred - torch.where(m, target, torch.zeros_like(target)), torch.zeros_like(pred))
    return (diff ** 2).sum() / count


def augmented_loss(model, batch, state: TrainState) -> torch.Tensor:
    """L(A, θ) + λ·h(A) + (c/2)·h(A)² for one batch

    `model` provides task_loss(batch) and an `adjacency` holder whose
    constraint() is h(A) (identically zero unless A is learned).
    """
    task = model.task_loss(batch)
    h = model.adjacency.constraint()
    total = task + state.lagrangian_terms(h)
    if not bool(torch.isfinite(total)):
        logger.error(f"Non-finite augmented loss: task={float(task.detach())}, h={float(h.detach())}")
        raise NumericalError("augmented loss is not finite")
    return total
