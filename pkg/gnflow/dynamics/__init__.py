#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Synthetic interacting systems, the RK4 oracle, trajectory sampling and the
dataset file format.
"""

from gnflow.dynamics.batch import DEFAULT_SPLIT, TrajectoryBatch, split_batch
from gnflow.dynamics.dataset import sample_dataset, sample_times
from gnflow.dynamics.io import read_batch, write_batch
from gnflow.dynamics.solver import rk4_solve, rk4_step
from gnflow.dynamics.systems import (DEMO_ADJACENCY, DEMO_INITIAL, DEMO_MATRIX, FEATURE_DIM, SINK_MATRIX,
                                     SYSTEM_KINDS, SystemSpec, demo_system, make_system, sawtooth_solution,
                                     sawtooth_wave, sem_operator, shifted_initials, sink_rhs, solve_system,
                                     square_solution, square_wave, triangle_solution, triangle_wave)

__all__ = [
    'SystemSpec',
    'SYSTEM_KINDS',
    'FEATURE_DIM',
    'SINK_MATRIX',
    'DEMO_MATRIX',
    'DEMO_ADJACENCY',
    'DEMO_INITIAL',
    'make_system',
    'demo_system',
    'sem_operator',
    'sink_rhs',
    'triangle_wave',
    'sawtooth_wave',
    'square_wave',
    'triangle_solution',
    'sawtooth_solution',
    'square_solution',
    'solve_system',
    'shifted_initials',
    'rk4_step',
    'rk4_solve',
    'TrajectoryBatch',
    'DEFAULT_SPLIT',
    'split_batch',
    'sample_times',
    'sample_dataset',
    'read_batch',
    'write_batch',
]
