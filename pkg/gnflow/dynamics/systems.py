#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Ground-truth interacting systems.

All four systems share the SEM operator (I − Aᵀ): Sink through its vector
field, Triangle/Sawtooth/Square through closed-form solutions.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from gnflow.dynamics.solver import rk4_solve
from gnflow.errors import ConfigError, ShapeError
from gnflow.graphs import DagMatrix, adjacency_tensor, random_dag

logger = logging.getLogger("dynamics")

SYSTEM_KINDS = ("sink", "triangle", "sawtooth", "square")
FEATURE_DIM: Dict[str, int] = {"sink": 2, "triangle": 1, "sawtooth": 1, "square": 1}

SINK_MATRIX = np.array([[-4.0, 10.0], [-3.0, 2.0]])
DEMO_MATRIX = np.array([[-4.0, 5.0], [-3.0, 1.0]])
DEMO_ADJACENCY = np.array([[0.0, 0.5, 0.0], [0.0, 0.0, 0.7], [0.0, 0.0, 0.0]])
DEMO_INITIAL = np.array([[0.6, 0.5], [0.7, 0.1], [0.2, 0.3]])

# X0 sampling box per kind
INITIAL_RANGE: Dict[str, Tuple[float, float]] = {
    "sink": (0.0, 1.0), "triangle": (-2.0, 2.0), "sawtooth": (-2.0, 2.0), "square": (-2.0, 2.0),
}


@dataclass
class SystemSpec:
    kind: str
    adjacency: DagMatrix
    dynamics_matrix: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if self.kind not in SYSTEM_KINDS:
            raise ConfigError(f"unknown system {self.kind!r}, expected one of {list(SYSTEM_KINDS)}")
        if self.kind == "sink":
            if self.dynamics_matrix is None:
                self.dynamics_matrix = SINK_MATRIX.copy()
            self.dynamics_matrix = np.asarray(self.dynamics_matrix, dtype=np.float64)
            if self.dynamics_matrix.shape != (2, 2):
                raise ShapeError("SystemSpec", self.dynamics_matrix.shape, (2, 2))

    @property
    def n(self) -> int:
        return self.adjacency.n

    @property
    def d(self) -> int:
        return FEATURE_DIM[self.kind]

    def adjacency_array(self) -> np.ndarray:
        return self.adjacency.numpy()


def make_system(kind: str, n: int, density: float, seed: int) -> SystemSpec:
    """System of `kind` over a fresh random DAG"""
    if kind not in SYSTEM_KINDS:
        raise ConfigError(f"unknown system {kind!r}, expected one of {list(SYSTEM_KINDS)}")
    return SystemSpec(kind, random_dag(n, density, seed))


def demo_system() -> Tuple[SystemSpec, np.ndarray]:
    """The three-node interacting example: (Sink-type system with B = [[-4,5],[-3,1]], X0)"""
    spec = SystemSpec("sink", DagMatrix(DEMO_ADJACENCY.copy()), DEMO_MATRIX.copy())
    return spec, DEMO_INITIAL.copy()


def sem_operator(A) -> np.ndarray:
    """I − Aᵀ"""
    a = adjacency_tensor(A).detach().cpu().numpy() if not isinstance(A, np.ndarray) else A
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("sem_operator", a.shape)
    return np.eye(a.shape[0]) - a.T


def sink_rhs(t: float, X: np.ndarray, A, B_dyn: np.ndarray) -> np.ndarray:
    """(I − Aᵀ)·X·B_dynᵀ"""
    X = np.asarray(X, dtype=np.float64)
    B_dyn = np.asarray(B_dyn, dtype=np.float64)
    op = sem_operator(A)
    if X.shape[-2] != op.shape[0] or X.shape[-1] != B_dyn.shape[1] or B_dyn.shape[0] != B_dyn.shape[1]:
        raise ShapeError("sink_rhs", X.shape, op.shape, B_dyn.shape)
    return op @ X @ B_dyn.T


def triangle_wave(t) -> np.ndarray:
    """S(t) = ∫₀ᵗ sign(sin u) du = π − |(t mod 2π) − π|"""
    t = np.asarray(t, dtype=np.float64)
    return math.pi - np.abs(np.mod(t, 2.0 * math.pi) - math.pi)


def sawtooth_wave(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    return t - np.floor(t)


def square_wave(t) -> np.ndarray:
    return np.sign(np.sin(np.asarray(t, dtype=np.float64)))


def _closed_form(forcing: Callable, t, X0, A) -> np.ndarray:
    X0 = np.asarray(X0, dtype=np.float64)
    op = sem_operator(A)
    if X0.ndim != 2 or X0.shape[0] != op.shape[0]:
        raise ShapeError("closed_form", X0.shape, op.shape)
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise ConfigError("closed-form solutions need t >= 0")
    shift = forcing(t)[..., None, None]
    return op @ (X0 + shift)


def triangle_solution(t, X0, A) -> np.ndarray:
    """(I − Aᵀ)(X0 + S(t)); scalar t gives (n, 1), a time vector gives (N, n, 1)"""
    return _closed_form(triangle_wave, t, X0, A)


def sawtooth_solution(t, X0, A) -> np.ndarray:
    return _closed_form(sawtooth_wave, t, X0, A)


def square_solution(t, X0, A) -> np.ndarray:
    return _closed_form(square_wave, t, X0, A)


CLOSED_FORMS: Dict[str, Callable] = {
    "triangle": triangle_solution,
    "sawtooth": sawtooth_solution,
    "square": square_solution,
}


def solve_system(spec: SystemSpec, X0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Trajectory (N, n, d) of `spec` from X0 at the given sorted times"""
    if spec.kind == "sink":
        A = spec.adjacency_array()
        B = spec.dynamics_matrix
        return rk4_solve(lambda t, X: sink_rhs(t, X, A, B), X0, times)
    return CLOSED_FORMS[spec.kind](times, X0, spec.adjacency_array())


def shifted_initials(spec: SystemSpec, X0: np.ndarray, shifts) -> np.ndarray:
    """Move each node's initial point along its own trajectory

    Row j of the result is node j of the trajectory from X0 evaluated at
    time shifts[j].
    """
    X0 = np.asarray(X0, dtype=np.float64)
    shifts = np.asarray(shifts, dtype=np.float64)
    if shifts.shape != (spec.n,):
        raise ShapeError("shifted_initials", shifts.shape, (spec.n,))
    out = X0.copy()
    for j, tau in enumerate(shifts):
        if tau > 0:
            out[j] = solve_system(spec, X0, np.array([tau]))[0, j]
    return out
