#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
TrajectoryBatch text files.

    gnflow-data-v1 <kind> <n> <d> <N> <samples> <seed>
    per sample:
        one line of N times
        one line of n·d initial values
        N lines of n·d observed values
        N lines of n mask bits
    adjacency
    n lines of the DAG as CSV
"""

import logging

import numpy as np
import torch

from gnflow import DATA_VERSION
from gnflow.dynamics.batch import TrajectoryBatch
from gnflow.errors import DataError
from gnflow.graphs import DagMatrix
from gnflow.utils.textio import PathLike, format_row, open_for_read, open_for_write, parse_row, read_matrix, write_matrix

logger = logging.getLogger("dynamics")


def write_batch(path: PathLike, batch: TrajectoryBatch) -> None:
    S, N, n, d = len(batch), batch.N, batch.n, batch.d
    times = batch.times.numpy()
    initial = batch.initial.numpy().reshape(S, n * d)
    values = batch.values.numpy().reshape(S, N, n * d)
    mask = batch.mask.numpy().astype(np.int8)
    with open_for_write(path) as f:
        f.write(f"{DATA_VERSION} {batch.kind} {n} {d} {N} {S} {batch.seed}\n")
        for s in range(S):
            f.write(format_row(times[s]) + "\n")
            f.write(format_row(initial[s]) + "\n")
            write_matrix(f, values[s])
            for row in mask[s]:
                f.write(",".join(str(int(b)) for b in row) + "\n")
        if batch.adjacency is not None:
            f.write("adjacency\n")
            write_matrix(f, batch.adjacency.numpy())
    logger.info(f"Wrote {S} samples to {path}")


def read_batch(path: PathLike) -> TrajectoryBatch:
    with open_for_read(path) as f:
        lines = iter([line for line in f.read().splitlines() if line.strip()])
    header = next(lines, "").split()
    if not header or header[0] != DATA_VERSION:
        raise DataError(f"{path}: unsupported data format {header[0] if header else '<empty>'!r}, "
                        f"expected {DATA_VERSION}")
    if len(header) != 7:
        raise DataError(f"{path}: malformed header")
    try:
        kind = header[1]
        n, d, N, S, seed = (int(v) for v in header[2:])
    except ValueError as e:
        raise DataError(f"{path}: malformed header") from e

    times = np.empty((S, N))
    initial = np.empty((S, n * d))
    values = np.empty((S, N, n * d))
    mask = np.empty((S, N, n), dtype=bool)
    for s in range(S):
        times[s] = read_matrix(lines, 1, N)[0]
        initial[s] = read_matrix(lines, 1, n * d)[0]
        values[s] = read_matrix(lines, N, n * d)
        bits = read_matrix(lines, N, n)
        if not np.isin(bits, (0.0, 1.0)).all():
            raise DataError(f"{path}: mask bits must be 0 or 1 (sample {s})")
        mask[s] = bits.astype(bool)

    adjacency = None
    marker = next(lines, None)
    if marker is not None:
        if marker.strip() != "adjacency":
            raise DataError(f"{path}: expected 'adjacency', got {marker[:40]!r}")
        adjacency = DagMatrix(torch.from_numpy(read_matrix(lines, n, n)))
    return TrajectoryBatch(
        times=torch.from_numpy(times),
        values=torch.from_numpy(values.reshape(S, N, n, d)),
        mask=torch.from_numpy(mask),
        initial=torch.from_numpy(initial.reshape(S, n, d)),
        adjacency=adjacency,
        kind=kind,
        seed=seed,
    )
