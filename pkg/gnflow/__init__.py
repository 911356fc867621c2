#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
gnflow

Graph-conditioned neural flows for interacting ODE systems: solution curves
parameterized by invertible flows that read a learned DAG adjacency, trained
with an augmented-Lagrangian acyclicity constraint.
"""

__version__ = "0.3.0"

# Format tags carried by every file the package writes.
CHECKPOINT_VERSION = "gnflow-v1"
DATA_VERSION = "gnflow-data-v1"
