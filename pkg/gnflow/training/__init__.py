#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Configuration, losses, the augmented-Lagrangian trainer and experiment
procedures.
"""

from gnflow.training.config import ExperimentConfig, al_defaults, build_config, load_config, load_preset
from gnflow.training.engine import ExperimentEngine, experiment_engine
from gnflow.training.evaluate import evaluate_forecast, evaluation_report
from gnflow.training.experiments import (ExperimentData, compare_graph_modes, perturbation_study, prepare_data,
                                         split_existing, timing_benchmark)
from gnflow.training.factory import build_flow, build_model, model_from_checkpoint, save_model
from gnflow.training.losses import augmented_loss, mse_loss
from gnflow.training.state import TrainState
from gnflow.training.trainer import HISTORY_COLUMNS, TrainingResult, train_gneuralflow, write_history

__all__ = [
    'ExperimentConfig',
    'al_defaults',
    'build_config',
    'load_config',
    'load_preset',
    'TrainState',
    'mse_loss',
    'augmented_loss',
    'build_flow',
    'build_model',
    'save_model',
    'model_from_checkpoint',
    'TrainingResult',
    'HISTORY_COLUMNS',
    'train_gneuralflow',
    'write_history',
    'evaluate_forecast',
    'evaluation_report',
    'ExperimentData',
    'prepare_data',
    'split_existing',
    'compare_graph_modes',
    'perturbation_study',
    'timing_benchmark',
    'ExperimentEngine',
    'experiment_engine',
]
