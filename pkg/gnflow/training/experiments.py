#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Experiment procedures: single runs, graph-mode comparison, the DAG
perturbation study and the per-epoch timing benchmark.
"""

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from gnflow import __version__
from gnflow.dynamics import SystemSpec, TrajectoryBatch, make_system, sample_dataset, split_batch
from gnflow.graphs import graph_metrics, perturb_dag
from gnflow.training.config import ExperimentConfig
from gnflow.training.engine import experiment_engine
from gnflow.training.evaluate import evaluate_forecast, evaluation_report
from gnflow.training.factory import save_model
from gnflow.training.trainer import train_gneuralflow, write_history

logger = logging.getLogger("experiments")

STUDY_COLUMNS = ["sigma", "seed", "tpr", "fdr", "fpr", "shd", "reversed", "mse", "h_A"]
BENCH_COLUMNS = ["arch", "graph", "epochs", "total_seconds", "seconds_per_epoch"]
COMPARE_COLUMNS = ["seed", "graph", "mse", "h_A"]


@dataclass
class ExperimentData:
    spec: SystemSpec
    batch: TrajectoryBatch
    train: TrajectoryBatch
    val: TrajectoryBatch
    test: TrajectoryBatch


def prepare_data(config: ExperimentConfig, seed: Optional[int] = None) -> ExperimentData:
    """Generate the configured system and dataset, then split it"""
    seed = config.seed if seed is None else seed
    spec = make_system(config.system, config.nodes, config.density, seed)
    batch = sample_dataset(spec, config.samples, config.times, seed, config.mask_rate, config.workers)
    return ExperimentData(spec, batch, *split_batch(batch, config.split, seed))


def split_existing(batch: TrajectoryBatch, config: ExperimentConfig) -> ExperimentData:
    """Split a dataset read from disk"""
    spec = SystemSpec(batch.kind, batch.adjacency) if batch.adjacency is not None else None
    return ExperimentData(spec, batch, *split_batch(batch, config.split, config.seed))


def compare_graph_modes(config: ExperimentConfig, seeds: Sequence[int],
                        modes: Sequence[str] = ("learned", "truth", "none")) -> pd.DataFrame:
    """Test MSE per seed and graph mode on identical data"""
    rows = []
    for seed in seeds:
        data = prepare_data(config, seed)
        jobs = []
        for mode in modes:
            cfg = config.updated(graph=mode, seed=seed)
            jobs.append((f"{mode}-{seed}", _train_and_score, {"config": cfg, "data": data}))
        results = experiment_engine.run_jobs(jobs, config.workers)
        for mode in modes:
            mse, h_value = results[f"{mode}-{seed}"]
            rows.append({"seed": seed, "graph": mode, "mse": mse, "h_A": h_value})
    return pd.DataFrame(rows, columns=COMPARE_COLUMNS)


def _train_and_score(config: ExperimentConfig, data: ExperimentData):
    result = train_gneuralflow(config, (data.train, data.val))
    return evaluate_forecast(result.model, data.test), result.h_final


def _perturbation_run(config: ExperimentConfig, data: ExperimentData, sigma: float, seed: int) -> Dict[str, Any]:
    truth = data.spec.adjacency
    initial = perturb_dag(truth, sigma, seed)
    result = train_gneuralflow(config, (data.train, data.val), initial_adjacency=initial)
    metrics = graph_metrics(result.dag, truth, config.edge_threshold)
    row = {"sigma": sigma, "seed": seed, "mse": evaluate_forecast(result.model, data.test),
           "h_A": result.h_final}
    row.update(metrics.model_dump(exclude={"threshold"}))
    logger.info(f"sigma={sigma} seed={seed}: tpr={metrics.tpr:.3f} shd={metrics.shd} mse={row['mse']:.4g}")
    return row


def perturbation_study(config: ExperimentConfig, sigmas: Sequence[float], seed: Optional[int] = None,
                       seeds: Optional[Sequence[int]] = None) -> pd.DataFrame:
    """Train from perturb_dag(truth, σ) for each σ and report graph metrics and MSE

    One row per σ per seed. The dataset of a seed is shared by all σ.
    """
    seeds = list(seeds) if seeds else [config.seed if seed is None else seed]
    cfg = config.updated(graph="learned")
    rows: List[Dict[str, Any]] = []
    for s in seeds:
        run_cfg = cfg.updated(seed=s)
        data = prepare_data(run_cfg, s)
        jobs = [(f"sigma={sigma}", _perturbation_run,
                 {"config": run_cfg, "data": data, "sigma": float(sigma), "seed": s}) for sigma in sigmas]
        rows.extend(experiment_engine.run_jobs(jobs, config.workers).values())
    return pd.DataFrame(rows, columns=STUDY_COLUMNS)


def timing_benchmark(config: ExperimentConfig, archs: Sequence[str] = ("resnet", "gru", "coupling"),
                     modes: Sequence[str] = ("learned", "none"),
                     data: Optional[ExperimentData] = None) -> pd.DataFrame:
    """Seconds per training epoch for each architecture with and without the graph

    Every run trains exactly config.epochs epochs in one outer iteration on the
    same batches; data generation is outside the timed region.
    """
    data = data or prepare_data(config)
    rows = []
    for arch in archs:
        for mode in modes:
            cfg = config.updated(arch=arch, graph=mode, outer_iterations=1, patience=max(config.epochs, 1))
            started = time.perf_counter()
            result = train_gneuralflow(cfg, (data.train, data.val))
            total = time.perf_counter() - started
            rows.append({"arch": arch, "graph": mode, "epochs": len(result.history),
                         "total_seconds": total, "seconds_per_epoch": result.seconds_per_epoch})
            logger.info(f"bench {arch}/{mode}: {result.seconds_per_epoch:.4f} s/epoch")
    return pd.DataFrame(rows, columns=BENCH_COLUMNS)


def run_training(config: ExperimentConfig, output_dir: Path) -> Dict[str, Any]:
    """Generate, train, evaluate and write history, checkpoint and metrics"""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    data = prepare_data(config)
    result = train_gneuralflow(config, (data.train, data.val))
    write_history(output_dir / "history.csv", result.history)
    save_model(output_dir / "model.ckpt", result.model, config)
    report = evaluation_report(result.model, data.test, data.spec.adjacency, config.edge_threshold)
    report["version"] = __version__
    with open(output_dir / "metrics.json", 'w', encoding='utf-8') as f:
        json.dump(report, f, indent=2, sort_keys=True)
    return report


def run_study(config: ExperimentConfig, output_dir: Path, sigmas: Sequence[float] = (0.0, 0.1, 0.2, 0.3)) -> pd.DataFrame:
    frame = perturbation_study(config, sigmas)
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    frame.to_csv(Path(output_dir) / "study.csv", index=False, float_format="%.10g")
    return frame


def run_bench(config: ExperimentConfig, output_dir: Path) -> pd.DataFrame:
    frame = timing_benchmark(config)
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    frame.to_csv(Path(output_dir) / "bench.csv", index=False, float_format="%.10g")
    return frame


def run_comparison(config: ExperimentConfig, output_dir: Path, seeds: Sequence[int] = (0, 1, 2)) -> pd.DataFrame:
    frame = compare_graph_modes(config, seeds)
    Path(output_dir).mkdir(parents=True, exist_ok=True)
    frame.to_csv(Path(output_dir) / "compare.csv", index=False, float_format="%.10g")
    return frame
