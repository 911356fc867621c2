#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Named parameter store with Adam moments.

A ParamStore is owned by exactly one optimizer loop. Gradients are computed
with torch autograd and applied through torch.optim.Adam after a finiteness
check.
"""

import logging
from collections import OrderedDict
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import torch

from gnflow.diffcore.tensor import DTYPE
from gnflow.errors import NumericalError, ShapeError

logger = logging.getLogger("diffcore")

# Canonical Adam constants
DEFAULT_LR = 1e-3
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPS = 1e-8


class ParamStore:
    """Named trainable tensors plus their first/second moment accumulators"""

    def __init__(self, params: Union[Mapping[str, torch.Tensor], Iterable[Tuple[str, torch.Tensor]]],
                 lr: float = DEFAULT_LR, beta1: float = DEFAULT_BETA1,
                 beta2: float = DEFAULT_BETA2, eps: float = DEFAULT_EPS):
        items = params.items() if isinstance(params, Mapping) else params
        self.params: "OrderedDict[str, torch.Tensor]" = OrderedDict()
        for name, p in items:
            if not p.requires_grad:
                continue
            if p.dtype != DTYPE:
                raise ValueError(f"parameter {name} must be float64, got {p.dtype}")
            self.params[name] = p
        # one param group per tensor so learning rates can differ by name
        self.optimizer = torch.optim.Adam(
            [{"params": [p], "name": name} for name, p in self.params.items()],
            lr=lr, betas=(beta1, beta2), eps=eps
        )
        self.steps = 0

    @classmethod
    def from_module(cls, module: torch.nn.Module, **kwargs) -> "ParamStore":
        """Collect every trainable parameter of a module"""
        return cls(module.named_parameters(), **kwargs)

    def __len__(self) -> int:
        return len(self.params)

    def __iter__(self):
        return iter(self.params)

    def __getitem__(self, name: str) -> torch.Tensor:
        return self.params[name]

    def moments(self, name: str) -> Tuple[torch.Tensor, torch.Tensor]:
        """First and second moment tensors of one parameter (zeros before the first step)"""
        p = self.params[name]
        state = self.optimizer.state.get(p, {})
        if "exp_avg" not in state:
            return torch.zeros_like(p), torch.zeros_like(p)
        return state["exp_avg"], state["exp_avg_sq"]

    def lr_of(self, name: str) -> float:
        for group in self.optimizer.param_groups:
            if group["name"] == name:
                return group["lr"]
        raise KeyError(name)

    def set_lr(self, lr: float, names: Optional[Iterable[str]] = None) -> None:
        """Learning rate for the named parameters, or for all of them"""
        selected = None if names is None else set(names)
        for group in self.optimizer.param_groups:
            if selected is None or group["name"] in selected:
                group["lr"] = lr

    def reset_moments(self) -> None:
        """Drop the Adam moments and per-parameter step counts"""
        self.optimizer.state.clear()


def grad(loss: torch.Tensor, params: ParamStore, retain_graph: bool = False) -> Dict[str, torch.Tensor]:
    """Reverse-mode gradient of a scalar loss for every parameter in the store

    Parameters the loss does not reach get a zero gradient.
    """
    if loss.numel() != 1:
        raise ShapeError("grad (loss must be scalar)", loss.shape)
    names = list(params.params)
    tensors = [params.params[n] for n in names]
    if not loss.requires_grad:
        return {n: torch.zeros_like(t) for n, t in zip(names, tensors)}
    grads = torch.autograd.grad(loss.reshape(()), tensors, allow_unused=True, retain_graph=retain_graph)
    return {
        n: (g if g is not None else torch.zeros_like(t))
        for n, t, g in zip(names, tensors, grads)
    }


def adam_step(params: ParamStore, grads: Mapping[str, torch.Tensor],
              lr: Optional[float] = None, beta1: Optional[float] = None,
              beta2: Optional[float] = None, eps: Optional[float] = None) -> ParamStore:
    """Apply one bias-corrected Adam update in place

    Args:
        params: the store to update
        grads: gradient per parameter name, shapes must match
        lr, beta1, beta2, eps: optional overrides of the store's settings

    Returns:
        the same store, step counter incremented
    """
    for name, p in params.params.items():
        g = grads.get(name)
        if g is None:
            continue
        if g.shape != p.shape:
            raise ShapeError(f"adam_step[{name}]", p.shape, g.shape)
        if not torch.isfinite(g).all():
            bad = int((~torch.isfinite(g)).sum())
            logger.error(f"Non-finite gradient for {name}: {bad} entries, step rejected")
            raise NumericalError(f"non-finite gradient for parameter {name}")

    for group in params.optimizer.param_groups:
        if lr is not None:
            group["lr"] = lr
        if beta1 is not None or beta2 is not None:
            b1, b2 = group["betas"]
            group["betas"] = (b1 if beta1 is None else beta1, b2 if beta2 is None else beta2)
        if eps is not None:
            group["eps"] = eps

    for name, p in params.params.items():
        g = grads.get(name)
        p.grad = torch.zeros_like(p) if g is None else g.detach().clone()
    params.optimizer.step()
    params.optimizer.zero_grad(set_to_none=True)
    params.steps += 1
    return params
