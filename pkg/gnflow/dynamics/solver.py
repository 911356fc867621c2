#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Classic fourth-order Runge–Kutta with a fixed maximum substep."""

import logging
import math
from typing import Callable

import numpy as np

from gnflow.errors import ConfigError, NumericalError

logger = logging.getLogger("dynamics")

MAX_STEP = 1e-3

Rhs = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(rhs: Rhs, t: float, x: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(t, x)
    k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2)
    k4 = rhs(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_solve(rhs: Rhs, X0, times, max_step: float = MAX_STEP, t0: float = 0.0) -> np.ndarray:
    """Integrate ẋ = rhs(t, x) from x(t0) = X0 and report x at each time

    Every gap between consecutive report times is split into equal substeps
    of length at most `max_step`.

    Args:
        rhs: vector field, called as rhs(t, x) with x shaped like X0
        X0: initial state at t0
        times: sorted report times, all >= t0
        max_step: largest substep

    Returns:
        array of shape (len(times), *X0.shape)
    """
    x = np.array(X0, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64).reshape(-1)
    if max_step <= 0:
        raise ConfigError(f"max_step must be positive, got {max_step}")
    if times.size and (times[0] < t0 or np.any(np.diff(times) < 0)):
        raise ConfigError("rk4_solve needs sorted times not before t0")

    out = np.empty((times.size,) + x.shape, dtype=np.float64)
    t = float(t0)
    for i, target in enumerate(times):
        gap = float(target) - t
        steps = int(math.ceil(gap / max_step)) if gap > 0 else 0
        if steps:
            h = gap / steps
            for k in range(steps):
                x = rk4_step(rhs, t + k * h, x, h)
                if not np.all(np.isfinite(x)):
                    bad_t = t + (k + 1) * h
                    logger.error(f"RK4 state became non-finite at t={bad_t:.6g}")
                    raise NumericalError(f"non-finite state at t={bad_t:.6g}")
        t = float(target)
        out[i] = x
    return out
