#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""DAG adjacency container, DAG oracle and generators."""

import logging
from dataclasses import dataclass, field
from typing import Union

import networkx as nx
import numpy as np
import scipy.sparse as sp
import torch

from gnflow.diffcore import as_tensor, make_rng
from gnflow.diffcore.tensor import ArrayLike
from gnflow.errors import ConfigError, ShapeError

logger = logging.getLogger("graphs")

STRICT_TOLERANCE = 1e-8


@dataclass
class DagMatrix:
    """Weighted adjacency; weights[i, j] != 0 means node i is a parent of node j"""

    weights: torch.Tensor
    strict: bool = field(default=False)

    def __post_init__(self):
        self.weights = as_tensor(self.weights)
        w = self.weights
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ShapeError("DagMatrix", w.shape)
        if bool(torch.diagonal(w.detach()).any()):
            raise ConfigError("DagMatrix requires a zero diagonal")
        if self.strict:
            from gnflow.graphs.acyclicity import acyclicity_expm
            h = float(acyclicity_expm(w.detach()))
            if h > STRICT_TOLERANCE:
                raise ConfigError(f"strict DagMatrix is not acyclic: h(A) = {h:.3e}")

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def numpy(self) -> np.ndarray:
        return self.weights.detach().cpu().numpy().copy()

    @classmethod
    def zeros(cls, n: int) -> "DagMatrix":
        return cls(torch.zeros(n, n, dtype=torch.float64))


AdjacencyLike = Union[DagMatrix, ArrayLike]


def adjacency_tensor(A: AdjacencyLike) -> torch.Tensor:
    """Weights tensor of a DagMatrix, or the argument itself as float64"""
    if isinstance(A, DagMatrix):
        return A.weights
    return as_tensor(A)


def _square(op: str, A: AdjacencyLike) -> torch.Tensor:
    w = adjacency_tensor(A)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ShapeError(op, w.shape)
    return w


def is_dag(A: AdjacencyLike) -> bool:
    """True iff the nonzero pattern has no directed cycle (topological-sort oracle)"""
    w = _square("is_dag", A).detach().cpu().numpy()
    if np.any(np.diag(w) != 0):
        raise ConfigError("is_dag requires a zero diagonal")
    graph = nx.from_numpy_array((w != 0).astype(np.int8), create_using=nx.DiGraph)
    return nx.is_directed_acyclic_graph(graph)


def threshold_dag(A: AdjacencyLike, threshold: float) -> DagMatrix:
    """Drop entries with magnitude at or below `threshold`"""
    w = _square("threshold_dag", A).detach().clone()
    w[w.abs() <= threshold] = 0.0
    w.fill_diagonal_(0.0)
    return DagMatrix(w)


def random_dag(n: int, density: float, seed: int) -> DagMatrix:
    """Random weighted DAG

    A sparse n×n matrix with uniform (0, 1) nonzeros is drawn, only its
    strict upper triangle is kept, and rows/columns are permuted
    symmetrically.
    """
    if n < 1:
        raise ConfigError(f"node count must be >= 1, got {n}")
    if not 0.0 < density <= 1.0:
        raise ConfigError(f"density must be in (0, 1], got {density}")
    rng = make_rng(seed, 0)
    low = np.nextafter(0.0, 1.0)
    mat = sp.random(n, n, density=density, format="coo", random_state=rng,
                    data_rvs=lambda k: rng.uniform(low, 1.0, size=k))
    upper = np.triu(mat.toarray(), k=1)
    perm = rng.permutation(n)
    weights = upper[np.ix_(perm, perm)]
    logger.debug(f"random_dag n={n} density={density} seed={seed}: {int((weights != 0).sum())} edges")
    return DagMatrix(torch.from_numpy(np.ascontiguousarray(weights)))


def perturb_dag(truth: AdjacencyLike, sigma: float, seed: int) -> DagMatrix:
    """Add independent N(0, sigma²) noise to every off-diagonal entry

    The result is an initial guess for graph learning and need not be a DAG.
    """
    if sigma < 0:
        raise ConfigError(f"sigma must be >= 0, got {sigma}")
    w = _square("perturb_dag", truth).detach().cpu().numpy().copy()
    if sigma > 0:
        n = w.shape[0]
        noise = make_rng(seed, 1).normal(0.0, sigma, size=(n, n))
        np.fill_diagonal(noise, 0.0)
        w = w + noise
    return DagMatrix(torch.from_numpy(w))
