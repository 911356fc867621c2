#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Irregularly sampled trajectories and the train/validation/test split."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import torch

from gnflow.diffcore import as_tensor, make_rng
from gnflow.errors import ConfigError, DataError, ShapeError
from gnflow.graphs import DagMatrix

DEFAULT_SPLIT = (0.6, 0.2, 0.2)


@dataclass
class TrajectoryBatch:
    """S samples of N observations over n nodes with d features

    times (S, N) strictly increasing per sample, values (S, N, n, d),
    mask (S, N, n) booleans, initial (S, n, d).
    """

    times: torch.Tensor
    values: torch.Tensor
    mask: torch.Tensor
    initial: torch.Tensor
    adjacency: Optional[DagMatrix] = None
    kind: str = "unknown"
    seed: int = 0

    def __post_init__(self):
        self.times = as_tensor(self.times)
        self.values = as_tensor(self.values)
        self.initial = as_tensor(self.initial)
        self.mask = torch.as_tensor(self.mask).to(torch.bool)
        S, N = self.times.shape
        if self.values.ndim != 4 or self.values.shape[:2] != (S, N):
            raise ShapeError("TrajectoryBatch.values", self.values.shape, self.times.shape)
        n, d = self.values.shape[2:]
        if self.mask.shape != (S, N, n):
            raise ShapeError("TrajectoryBatch.mask", self.mask.shape, (S, N, n))
        if self.initial.shape != (S, n, d):
            raise ShapeError("TrajectoryBatch.initial", self.initial.shape, (S, n, d))
        if N > 1 and not bool((self.times[:, 1:] > self.times[:, :-1]).all()):
            raise DataError("times must be strictly increasing within each sample")
        observed = self.values[self.mask]
        if not bool(torch.isfinite(observed).all()):
            raise DataError("observed values must be finite")

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def N(self) -> int:
        return self.times.shape[1]

    @property
    def n(self) -> int:
        return self.values.shape[2]

    @property
    def d(self) -> int:
        return self.values.shape[3]

    def subset(self, indices: Sequence[int]) -> "TrajectoryBatch":
        idx = torch.as_tensor(list(indices), dtype=torch.long)
        return TrajectoryBatch(self.times[idx], self.values[idx], self.mask[idx], self.initial[idx],
                               self.adjacency, self.kind, self.seed)

    def batches(self, size: int, rng: Optional[np.random.Generator] = None):
        """Mini-batches of at most `size` samples, shuffled when rng is given"""
        order = np.arange(len(self)) if rng is None else rng.permutation(len(self))
        for start in range(0, len(self), size):
            yield self.subset(order[start:start + size].tolist())


def split_batch(batch: TrajectoryBatch, ratios: Tuple[float, float, float] = DEFAULT_SPLIT,
                seed: int = 0) -> Tuple[TrajectoryBatch, TrajectoryBatch, TrajectoryBatch]:
    """Shuffle samples with `seed` and cut them into train/validation/test"""
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must be three non-negative numbers summing to 1, got {ratios}")
    S = len(batch)
    if S < 3:
        raise ConfigError(f"need at least 3 samples to split, got {S}")
    order = make_rng(seed, 3).permutation(S)
    n_train = max(1, int(np.floor(ratios[0] * S)))
    n_val = max(1, int(np.floor(ratios[1] * S)))
    n_train = min(n_train, S - 2)
    n_val = min(n_val, S - n_train - 1)
    parts = (order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:])
    return tuple(batch.subset(p.tolist()) for p in parts)
