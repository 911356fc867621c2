#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Shared fixtures: small configs, tiny datasets and the three-node example graph."""

import numpy as np
import pytest
import torch

from gnflow.dynamics import DEMO_ADJACENCY
from gnflow.training import build_config, prepare_data

TINY = dict(
    system="triangle", nodes=3, times=6, samples=10, density=0.5,
    hidden=8, mlp_layers=1, gcn_hidden=4, latent_dim=4, eval_mc=2,
    epochs=2, patience=2, outer_iterations=2, batch_size=4,
)


def tiny_config(**changes):
    return build_config({**TINY, **changes})


@pytest.fixture
def make_config():
    return tiny_config


@pytest.fixture
def tiny_data():
    return prepare_data(tiny_config())


@pytest.fixture
def demo_adjacency():
    return torch.from_numpy(DEMO_ADJACENCY.copy())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
