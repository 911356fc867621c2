#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Exception hierarchy. Library code raises; only the CLI maps to exit codes."""

from typing import Any, Dict, List, Optional, Sequence


class GNFlowError(Exception):
    """Base class for all gnflow failures"""

    exit_code = 1


class ConfigError(GNFlowError, ValueError):
    """Invalid flags, config values or call arguments"""

    exit_code = 2


class ShapeError(GNFlowError, ValueError):
    """Operands whose shapes cannot be combined"""

    exit_code = 3

    def __init__(self, op: str, *shapes: Sequence[int]):
        self.op = op
        self.shapes = [tuple(s) for s in shapes]
        rendered = " vs ".join(str(list(s)) for s in self.shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}")


class DataError(GNFlowError):
    """Missing, malformed or unsupported input files"""

    exit_code = 3


class NumericalError(GNFlowError):
    """Non-finite values where finite ones are required"""

    exit_code = 4


class TrainingDiverged(NumericalError):
    """Training produced a non-finite loss; carries the history so far"""

    def __init__(self, message: str, history: Optional[List[Dict[str, Any]]] = None):
        super().__init__(message)
        self.history = list(history or [])
