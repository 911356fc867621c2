#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Differentiable dense-tensor core: checked ops, gradients, Adam, expm and
spectral-norm control.
"""

from gnflow.diffcore import tensor as ops
from gnflow.diffcore.linalg import clip_spectral, matrix_exponential, spectral_norm
from gnflow.diffcore.params import ParamStore, adam_step, grad
from gnflow.diffcore.rng import make_rng, split_seeds
from gnflow.diffcore.tensor import DTYPE, as_tensor

__all__ = [
    'ops',
    'DTYPE',
    'as_tensor',
    'ParamStore',
    'grad',
    'adam_step',
    'matrix_exponential',
    'spectral_norm',
    'clip_spectral',
    'make_rng',
    'split_seeds',
]
