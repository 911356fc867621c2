#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
DAG representation, acyclicity functions, adjacency normalization, random
DAGs and graph metrics.
"""

from gnflow.graphs.acyclicity import acyclicity, acyclicity_expm, acyclicity_poly, grad_acyclicity_expm
from gnflow.graphs.dag import AdjacencyLike, DagMatrix, adjacency_tensor, is_dag, perturb_dag, random_dag, threshold_dag
from gnflow.graphs.io import read_dag_csv, write_dag_csv
from gnflow.graphs.metrics import DEFAULT_EDGE_THRESHOLD, GraphMetrics, graph_metrics
from gnflow.graphs.normalize import NormalizedAdjacency, mask_adjacency, normalize_adjacency

__all__ = [
    'AdjacencyLike',
    'DagMatrix',
    'adjacency_tensor',
    'is_dag',
    'threshold_dag',
    'random_dag',
    'perturb_dag',
    'acyclicity',
    'acyclicity_expm',
    'acyclicity_poly',
    'grad_acyclicity_expm',
    'NormalizedAdjacency',
    'normalize_adjacency',
    'mask_adjacency',
    'GraphMetrics',
    'graph_metrics',
    'DEFAULT_EDGE_THRESHOLD',
    'read_dag_csv',
    'write_dag_csv',
]
