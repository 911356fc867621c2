#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Augmented-Lagrangian bookkeeping."""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from gnflow.errors import ConfigError

logger = logging.getLogger("training")


@dataclass
class TrainState:
    """λ, c and the previous constraint value across outer iterations"""

    eta: float
    gamma_al: float
    lam: float = 0.0
    penalty: float = 1.0
    dag_threshold: float = 1e-8
    h_prev: Optional[float] = field(default=None)
    outer: int = 0

    def __post_init__(self):
        if not self.eta > 1.0:
            raise ConfigError(f"eta must exceed 1, got {self.eta}")
        if not 0.0 < self.gamma_al < 1.0:
            raise ConfigError(f"gamma_al must be in (0, 1), got {self.gamma_al}")

    def lagrangian_terms(self, h):
        """λ·h + (c/2)·h²"""
        return self.lam * h + 0.5 * self.penalty * h * h

    def update(self, h: float) -> None:
        """Close outer iteration k with constraint value h(Aᵏ)"""
        if not math.isfinite(h):
            raise ConfigError(f"constraint value must be finite, got {h}")
        self.lam += self.penalty * h
        if self.h_prev is not None and abs(h) > self.gamma_al * abs(self.h_prev):
            self.penalty *= self.eta
        self.h_prev = h
        self.outer += 1

    def converged(self, h: float) -> bool:
        return abs(h) < self.dag_threshold
