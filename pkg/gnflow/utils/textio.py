#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Line-oriented text helpers shared by the dataset, DAG and checkpoint formats.

Floats are written with Python's shortest round-trip representation so a
read-back is bit-exact and repeated writes are byte-identical.
"""

import os
from pathlib import Path
from typing import Iterable, Iterator, List, TextIO, Union

import numpy as np

from gnflow.errors import DataError

PathLike = Union[str, os.PathLike]


def format_row(values: Iterable[float]) -> str:
    """Render one CSV row of floats"""
    return ",".join(repr(float(v)) for v in values)


def parse_row(line: str, expected: int = -1) -> List[float]:
    """Parse one CSV row of floats

    Args:
        line: text line without trailing newline
        expected: required number of values, -1 to skip the check

    Returns:
        list of floats
    """
    line = line.strip()
    if not line:
        values = []
    else:
        try:
            values = [float(tok) for tok in line.split(",")]
        except ValueError as e:
            raise DataError(f"malformed numeric row: {line[:60]!r}") from e
    if expected >= 0 and len(values) != expected:
        raise DataError(f"expected {expected} values, got {len(values)}")
    return values


def write_matrix(handle: TextIO, matrix: np.ndarray) -> None:
    """Write a 2-D array as CSV rows"""
    for row in np.atleast_2d(matrix):
        handle.write(format_row(row) + "\n")


def read_matrix(lines: Iterator[str], rows: int, cols: int) -> np.ndarray:
    """Read `rows` CSV rows of `cols` floats from a line iterator"""
    out = np.empty((rows, cols), dtype=np.float64)
    for i in range(rows):
        try:
            line = next(lines)
        except StopIteration:
            raise DataError(f"unexpected end of file after {i} of {rows} rows")
        out[i] = parse_row(line, cols)
    return out


def open_for_read(path: PathLike) -> TextIO:
    """Open a text file, turning a missing path into a DataError"""
    p = Path(path)
    if not p.exists():
        raise DataError(f"file not found: {p}")
    return open(p, "r", encoding="utf-8")


def open_for_write(path: PathLike) -> TextIO:
    """Open a text file for writing, creating parent directories"""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return open(p, "w", encoding="utf-8", newline="\n")
