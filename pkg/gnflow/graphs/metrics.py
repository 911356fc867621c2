#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Graph-quality metrics of a learned DAG against a reference."""

import logging

import numpy as np
from pydantic import BaseModel, Field

from gnflow.errors import ConfigError, ShapeError
from gnflow.graphs.dag import AdjacencyLike, _square

logger = logging.getLogger("graphs")

DEFAULT_EDGE_THRESHOLD = 0.3


class GraphMetrics(BaseModel):
    tpr: float = Field(ge=0.0, le=1.0)
    fdr: float = Field(ge=0.0, le=1.0)
    fpr: float = Field(ge=0.0, le=1.0)
    shd: int = Field(ge=0)
    # reversed edges are counted once in shd and also inside the fdr/fpr
    # numerators; kept separate so other conventions can be recomputed
    reversed: int = Field(default=0, ge=0)
    threshold: float = DEFAULT_EDGE_THRESHOLD


def edge_pattern(A: AdjacencyLike, threshold: float) -> np.ndarray:
    """Boolean edge matrix {(i, j): |aᵢⱼ| > threshold}, diagonal excluded"""
    w = _square("edge_pattern", A).detach().cpu().numpy()
    pattern = np.abs(w) > threshold
    np.fill_diagonal(pattern, False)
    return pattern


def structural_hamming_distance(learned: np.ndarray, truth: np.ndarray) -> int:
    """Edge insertions, deletions or reversals turning `learned` into `truth`"""
    n = truth.shape[0]
    shd = 0
    for i in range(n):
        for j in range(i + 1, n):
            l_ij, l_ji = bool(learned[i, j]), bool(learned[j, i])
            t_ij, t_ji = bool(truth[i, j]), bool(truth[j, i])
            if (l_ij, l_ji) == (t_ij, t_ji):
                continue
            if l_ij != l_ji and t_ij != t_ji:
                shd += 1  # single reversal
            else:
                shd += int(l_ij != t_ij) + int(l_ji != t_ji)
    return shd


def graph_metrics(learned: AdjacencyLike, truth: AdjacencyLike,
                  threshold: float = DEFAULT_EDGE_THRESHOLD) -> GraphMetrics:
    """TPR, FDR, FPR and SHD of the thresholded learned graph

    TPR = |E(L)∩E(T)| / |E(T)| (1 when the truth has no edges),
    FDR = |E(L)\\E(T)| / max(|E(L)|, 1),
    FPR = |E(L)\\E(T)| / max(#ordered non-edges of T, 1).
    """
    if threshold < 0:
        raise ConfigError(f"threshold must be >= 0, got {threshold}")
    L = edge_pattern(learned, threshold)
    T = edge_pattern(truth, threshold)
    if L.shape != T.shape:
        raise ShapeError("graph_metrics", L.shape, T.shape)
    n = T.shape[0]
    true_edges = int(T.sum())
    learned_edges = int(L.sum())
    hits = int((L & T).sum())
    false_pos = int((L & ~T).sum())
    reversed_edges = int((L & ~T & T.T).sum())
    non_edges = n * (n - 1) - true_edges

    tpr = hits / true_edges if true_edges else 1.0
    fdr = false_pos / max(learned_edges, 1)
    fpr = false_pos / max(non_edges, 1)
    if reversed_edges:
        logger.debug(f"{reversed_edges} reversed edges counted as false positives")
    return GraphMetrics(tpr=tpr, fdr=fdr, fpr=fpr,
                        shd=structural_hamming_distance(L, T),
                        reversed=reversed_edges, threshold=threshold)
