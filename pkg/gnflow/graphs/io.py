#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""DagMatrix CSV files: n rows of n comma-separated decimals, no header."""

import numpy as np
import torch

from gnflow.errors import DataError
from gnflow.graphs.dag import AdjacencyLike, DagMatrix, adjacency_tensor
from gnflow.utils.textio import PathLike, open_for_read, open_for_write, parse_row, write_matrix


def write_dag_csv(path: PathLike, A: AdjacencyLike) -> None:
    with open_for_write(path) as f:
        write_matrix(f, adjacency_tensor(A).detach().cpu().numpy())


def read_dag_csv(path: PathLike) -> DagMatrix:
    with open_for_read(path) as f:
        rows = [parse_row(line) for line in f if line.strip()]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise DataError(f"{path}: expected a square matrix, got {n} rows")
    return DagMatrix(torch.from_numpy(np.array(rows, dtype=np.float64)))
