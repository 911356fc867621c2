#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Graph-conditioned neural flows.

Architectures are modules of this package exposing `ARCHITECTURE` (the tag
used in configs and checkpoints) and `FLOW_CLASS`. They are discovered and
loaded on demand, the same way optional features are picked up at runtime.
"""

import importlib
import logging
import os
import pkgutil
from typing import Dict, List, Type

from gnflow.errors import ConfigError
from gnflow.flows.base import GraphConditionedFlow, check_gru_parameters, graph_features
from gnflow.flows.contraction import enforce_contraction
from gnflow.flows.coupling import CouplingFlow, invert_coupling
from gnflow.flows.gcn import GcnEncoder, gcn_encode
from gnflow.flows.gru import GruFlow
from gnflow.flows.mlp import MLP
from gnflow.flows.model import GRAPH_MODES, AdjacencyHolder, GraphFlow
from gnflow.flows.resnet import ResnetFlow

logger = logging.getLogger("flows")

# architecture tag -> flow class
_loaded_architectures: Dict[str, Type[GraphConditionedFlow]] = {}


def discover_architectures() -> List[str]:
    """Names of the modules in this package that define a flow architecture"""
    flows_dir = os.path.dirname(__file__)
    found = []
    for _, name, is_pkg in pkgutil.iter_modules([flows_dir]):
        if name.startswith('_') or is_pkg:
            continue
        module = importlib.import_module(f"gnflow.flows.{name}")
        if hasattr(module, 'ARCHITECTURE') and hasattr(module, 'FLOW_CLASS'):
            found.append(module.ARCHITECTURE)
    return sorted(found)


def load_architecture(arch: str) -> Type[GraphConditionedFlow]:
    """Import the module of architecture `arch` and cache its flow class"""
    if arch in _loaded_architectures:
        return _loaded_architectures[arch]
    try:
        module = importlib.import_module(f"gnflow.flows.{arch}")
        flow_class = module.FLOW_CLASS
    except (ImportError, AttributeError):
        raise ConfigError(f"unknown architecture {arch!r}, expected one of {discover_architectures()}") from None
    _loaded_architectures[arch] = flow_class
    logger.debug(f"Loaded flow architecture {arch}")
    return flow_class


def get_architecture(arch: str) -> Type[GraphConditionedFlow]:
    if arch not in _loaded_architectures:
        return load_architecture(arch)
    return _loaded_architectures[arch]


__all__ = [
    'GraphConditionedFlow',
    'check_gru_parameters',
    'graph_features',
    'MLP',
    'GcnEncoder',
    'gcn_encode',
    'ResnetFlow',
    'GruFlow',
    'CouplingFlow',
    'invert_coupling',
    'enforce_contraction',
    'AdjacencyHolder',
    'GraphFlow',
    'GRAPH_MODES',
    'discover_architectures',
    'load_architecture',
    'get_architecture',
]
