#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Latent-variable heads: smoothing (ELBO) and filtering (NLL + KL), both with
a graph-informed paired hidden state.
"""

from gnflow.latent.filtering import LatentFilter
from gnflow.latent.gaussian import GaussianParams, gaussian_kl, gaussian_nll
from gnflow.latent.heads import HiddenStatePair, evolve_hidden
from gnflow.latent.smoothing import LatentSmoother

__all__ = [
    'GaussianParams',
    'gaussian_kl',
    'gaussian_nll',
    'HiddenStatePair',
    'evolve_hidden',
    'LatentSmoother',
    'LatentFilter',
]
