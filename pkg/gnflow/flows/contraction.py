#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Spectral clipping of every linear map inside a flow."""

import logging
from typing import Optional

import torch
from torch import nn

from gnflow.diffcore import clip_spectral
from gnflow.flows.gcn import GcnEncoder
from gnflow.flows.mlp import MLP

logger = logging.getLogger("flows")


def _clip_(weight: torch.Tensor, bound: float) -> bool:
    clipped = clip_spectral(weight, bound)
    if clipped is weight:
        return False
    weight.copy_(clipped)
    return True


def enforce_contraction(module: nn.Module, bound: Optional[float] = None) -> nn.Module:
    """Clip MLP weights to `bound` and GCN weights W, U to `bound`/2, in place

    Since ‖Â‖₂ ≤ 2 for a DAG, the GCN then has Lipschitz constant at most
    4·(bound/2)² = bound² < 1. Compliant weights are left bit-identical.
    """
    if bound is None:
        bound = getattr(module, "lipschitz_bound", None)
        if bound is None:
            flows = [m for m in module.modules() if hasattr(m, "lipschitz_bound")]
            bound = flows[0].lipschitz_bound if flows else 0.9
    changed = 0
    with torch.no_grad():
        for sub in module.modules():
            if isinstance(sub, MLP):
                for layer in sub.linears():
                    changed += _clip_(layer.weight, bound)
            elif isinstance(sub, GcnEncoder):
                changed += _clip_(sub.W, bound / 2.0)
                changed += _clip_(sub.U, bound / 2.0)
    if changed:
        logger.debug(f"clipped {changed} weight matrices to spectral bound {bound}")
    return module
