#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Seeded synthetic datasets with irregular time grids."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Tuple

import numpy as np
import torch

from gnflow.diffcore import make_rng
from gnflow.dynamics.batch import TrajectoryBatch
from gnflow.dynamics.systems import INITIAL_RANGE, SystemSpec, solve_system
from gnflow.errors import ConfigError

logger = logging.getLogger("dynamics")

TIME_HORIZON = 10.0
SAMPLE_STREAM = 2


def sample_times(rng: np.random.Generator, N: int) -> np.ndarray:
    """N sorted, strictly increasing uniform draws from [0, 10]"""
    while True:
        times = np.sort(rng.uniform(0.0, TIME_HORIZON, size=N))
        if N == 1 or np.all(np.diff(times) > 0):
            return times


def _sample(spec: SystemSpec, N: int, seed: int, index: int,
            mask_rate: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    rng = make_rng(seed, SAMPLE_STREAM, index)
    times = sample_times(rng, N)
    low, high = INITIAL_RANGE[spec.kind]
    X0 = rng.uniform(low, high, size=(spec.n, spec.d))
    values = solve_system(spec, X0, times)
    mask = np.ones((N, spec.n), dtype=bool)
    if mask_rate > 0:
        mask = rng.random((N, spec.n)) >= mask_rate
        if not mask.any():
            mask[rng.integers(N), rng.integers(spec.n)] = True
    return times, X0, values, mask


def sample_dataset(spec: SystemSpec, samples: int, N: int, seed: int,
                   mask_rate: float = 0.0, workers: int = 1) -> TrajectoryBatch:
    """Draw `samples` trajectories of `spec`, each with its own time grid

    Every sample uses its own random stream, so the batch is identical for
    any number of workers. With `mask_rate` > 0 each node-time observation
    is hidden independently with that probability (X0 is always known).
    """
    if samples < 1 or N < 1:
        raise ConfigError(f"samples and N must be >= 1, got {samples}, {N}")
    if not 0.0 <= mask_rate < 1.0:
        raise ConfigError(f"mask_rate must be in [0, 1), got {mask_rate}")

    logger.info(f"Sampling {samples} {spec.kind} trajectories (n={spec.n}, N={N}, seed={seed})")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda i: _sample(spec, N, seed, i, mask_rate), range(samples)))
    else:
        parts = [_sample(spec, N, seed, i, mask_rate) for i in range(samples)]

    times, initial, values, mask = (np.stack(col) for col in zip(*parts))
    return TrajectoryBatch(
        times=torch.from_numpy(times),
        values=torch.from_numpy(values),
        mask=torch.from_numpy(mask),
        initial=torch.from_numpy(initial),
        adjacency=spec.adjacency,
        kind=spec.kind,
        seed=seed,
    )
