#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Self-describing model checkpoints.

Layout:
    gnflow-v1 <arch> <n> <d> <h>
    meta <json>
    tensor <name> <dim,dim,...>      ('-' for a scalar)
    <rows as CSV, tensor reshaped to (-1, last dim)>
    ...
"""

import json
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
import torch

from gnflow import CHECKPOINT_VERSION
from gnflow.errors import DataError
from gnflow.utils.textio import PathLike, format_row, open_for_read, open_for_write, parse_row

logger = logging.getLogger("flows")


@dataclass
class Checkpoint:
    arch: str
    n: int
    d: int
    hidden: int
    meta: Dict[str, Any] = field(default_factory=dict)
    tensors: "OrderedDict[str, torch.Tensor]" = field(default_factory=OrderedDict)


def save_checkpoint(path: PathLike, checkpoint: Checkpoint) -> None:
    with open_for_write(path) as f:
        f.write(f"{CHECKPOINT_VERSION} {checkpoint.arch} {checkpoint.n} {checkpoint.d} {checkpoint.hidden}\n")
        f.write("meta " + json.dumps(checkpoint.meta, sort_keys=True) + "\n")
        for name, tensor in checkpoint.tensors.items():
            array = tensor.detach().cpu().numpy().astype(np.float64)
            dims = ",".join(str(s) for s in array.shape) or "-"
            f.write(f"tensor {name} {dims}\n")
            if array.size == 0:
                continue
            rows = array.reshape(1, 1) if array.ndim == 0 else array.reshape(-1, array.shape[-1])
            for row in rows:
                f.write(format_row(row) + "\n")
    logger.info(f"Checkpoint written to {path} ({len(checkpoint.tensors)} tensors)")


def load_checkpoint(path: PathLike) -> Checkpoint:
    with open_for_read(path) as f:
        lines = iter(f.read().splitlines())
    header = next(lines, "").split()
    if len(header) != 5 or header[0] != CHECKPOINT_VERSION:
        raise DataError(f"{path}: not a {CHECKPOINT_VERSION} checkpoint (header {' '.join(header[:1])!r})")
    try:
        arch, n, d, hidden = header[1], int(header[2]), int(header[3]), int(header[4])
    except ValueError as e:
        raise DataError(f"{path}: malformed checkpoint header") from e

    meta_line = next(lines, "")
    if not meta_line.startswith("meta "):
        raise DataError(f"{path}: missing meta line")
    try:
        meta = json.loads(meta_line[5:])
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: malformed meta line") from e

    tensors: "OrderedDict[str, torch.Tensor]" = OrderedDict()
    for line in lines:
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "tensor":
            raise DataError(f"{path}: expected a tensor line, got {line[:40]!r}")
        name = parts[1]
        shape = () if parts[2] == "-" else tuple(int(s) for s in parts[2].split(","))
        size = int(np.prod(shape)) if shape else 1
        if size == 0:
            tensors[name] = torch.zeros(shape, dtype=torch.float64)
            continue
        cols = shape[-1] if shape else 1
        values = []
        for _ in range(size // cols):
            row = next(lines, None)
            if row is None:
                raise DataError(f"{path}: truncated tensor {name}")
            values.extend(parse_row(row, cols))
        tensors[name] = torch.tensor(values, dtype=torch.float64).reshape(shape)
    return Checkpoint(arch, n, d, hidden, meta, tensors)
