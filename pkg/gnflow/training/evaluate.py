#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Test-set forecast error and graph-quality reporting."""

import logging
from typing import Any, Dict, Optional

import torch
from torch import nn

from gnflow.dynamics import TrajectoryBatch
from gnflow.graphs import AdjacencyLike, graph_metrics
from gnflow.training.losses import mse_loss

logger = logging.getLogger("training")


def evaluate_forecast(model: nn.Module, test: TrajectoryBatch) -> float:
    """Masked MSE of model.predict(test), predicted from each sample's X0"""
    model.eval()
    with torch.no_grad():
        pred = model.predict(test)
        mse = float(mse_loss(pred, test.values, test.mask))
    model.train()
    return mse


def evaluation_report(model: nn.Module, test: TrajectoryBatch, truth: Optional[AdjacencyLike] = None,
                      threshold: float = 0.3) -> Dict[str, Any]:
    """Flat metrics mapping: mse, threshold and, with a truth DAG, the graph metrics"""
    report: Dict[str, Any] = {"mse": evaluate_forecast(model, test), "threshold": threshold,
                              "h_A": float(model.adjacency.constraint().detach())}
    if truth is not None:
        metrics = graph_metrics(model.adjacency.dag(), truth, threshold)
        report.update(metrics.model_dump(exclude={"threshold"}))
    logger.info(f"evaluation: {report}")
    return report
