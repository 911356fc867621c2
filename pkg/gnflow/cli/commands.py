#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Subcommand implementations. Each takes the parsed argparse namespace and
returns an exit code; failures surface as GNFlowError subclasses.
"""

import json
import logging
import time
from argparse import Namespace
from pathlib import Path
from typing import Any, Dict, List

from gnflow import __version__
from gnflow.cli.manifest import RunManifest, manifest_path, write_manifest
from gnflow.dynamics import make_system, read_batch, sample_dataset, write_batch
from gnflow.errors import ConfigError, DataError
from gnflow.flows import GRAPH_MODES, load_architecture
from gnflow.graphs import read_dag_csv, write_dag_csv
from gnflow.training import (ExperimentConfig, evaluation_report, experiment_engine, load_config,
                             model_from_checkpoint, perturbation_study, save_model, split_existing,
                             timing_benchmark, train_gneuralflow, write_history)
from gnflow.utils.textio import open_for_write

logger = logging.getLogger("cli")

METRICS_VERSION = "gnflow-metrics-v1"

# argparse dest -> ExperimentConfig field
CONFIG_FLAGS = (
    "system", "nodes", "times", "samples", "density", "mask_rate", "split", "seed",
    "arch", "graph", "task", "hidden", "epochs", "patience", "outer_iterations", "batch_size",
    "lr", "latent_dim", "workers",
)


def dag_path_for(data_path: Path) -> Path:
    """`runs/data.txt` -> `runs/data.dag.csv`"""
    return data_path.with_name(f"{data_path.stem}.dag.csv")


def parse_floats(text: str, flag: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def parse_ints(text: str, flag: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated integers, got {text!r}") from None


def config_from_args(args: Namespace, **extra: Any) -> ExperimentConfig:
    overrides = {name: getattr(args, name, None) for name in CONFIG_FLAGS}
    overrides.update(extra)
    return load_config(preset=args.preset, config_file=args.config, overrides=overrides)


def write_json(path: Path, payload: Dict[str, Any]) -> None:
    with open_for_write(path) as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def cmd_generate(args: Namespace) -> int:
    config = config_from_args(args)
    output = Path(args.output)
    spec = make_system(config.system, config.nodes, config.density, config.seed)
    batch = sample_dataset(spec, config.samples, config.times, config.seed, config.mask_rate, config.workers)
    write_batch(output, batch)
    write_dag_csv(dag_path_for(output), spec.adjacency)
    logger.info(f"Generated {config.samples} {config.system} samples (n={config.nodes}) into {output}")
    return 0


def cmd_train(args: Namespace) -> int:
    data_path = Path(args.data)
    batch = read_batch(data_path)
    extra: Dict[str, Any] = {"nodes": batch.n}
    if args.system is None and batch.kind in ("sink", "triangle", "sawtooth", "square"):
        extra["system"] = batch.kind
    config = config_from_args(args, **extra)
    if config.graph == "truth" and batch.adjacency is None:
        raise ConfigError(f"--graph truth needs a dataset with an adjacency block: {data_path}")

    output_dir = Path(args.output)
    output_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.start("train", config, output_dir, data_path)
    write_manifest(manifest_path(output_dir), manifest)

    started = time.perf_counter()
    data = split_existing(batch, config)
    result = train_gneuralflow(config, (data.train, data.val))
    write_history(output_dir / "history.csv", result.history)
    save_model(output_dir / "model.ckpt", result.model, config)

    manifest.timings = {"train_seconds": time.perf_counter() - started,
                        "seconds_per_epoch": result.seconds_per_epoch}
    manifest.status = "finished"
    write_manifest(manifest_path(output_dir), manifest)
    logger.info(f"Training finished: {len(result.history)} epochs, h(A)={result.h_final:.3g}")
    return 0


def cmd_eval(args: Namespace) -> int:
    model, config = model_from_checkpoint(args.checkpoint)
    batch = read_batch(args.data)
    if batch.n != model.n or batch.d != model.d:
        raise DataError(f"{args.data}: dataset has n={batch.n}, d={batch.d}, "
                        f"checkpoint expects n={model.n}, d={model.d}")
    test = split_existing(batch, config).test
    truth = read_dag_csv(args.truth) if args.truth else None
    report = evaluation_report(model, test, truth, args.threshold)
    report.update({"format": METRICS_VERSION, "version": __version__,
                   "checkpoint": str(args.checkpoint), "data": str(args.data)})
    write_json(Path(args.output), report)
    logger.info(f"Test MSE {report['mse']:.6g} written to {args.output}")
    return 0


def cmd_study(args: Namespace) -> int:
    config = config_from_args(args, graph="learned")
    sigmas = parse_floats(args.sigmas, "--sigmas")
    if not sigmas or any(s < 0 for s in sigmas):
        raise ConfigError(f"--sigmas must be non-negative, got {args.sigmas!r}")
    seeds = parse_ints(args.seeds, "--seeds") if args.seeds else [config.seed]
    frame = perturbation_study(config, sigmas, seeds=seeds)
    output = Path(args.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output, index=False, float_format="%.10g")
    logger.info(f"Wrote {len(frame)} study rows to {output}")
    return 0


def cmd_bench(args: Namespace) -> int:
    config = config_from_args(args)
    archs = [a.strip() for a in args.archs.split(",") if a.strip()]
    modes = [m.strip() for m in args.graphs.split(",") if m.strip()]
    if not archs:
        raise ConfigError("--archs names no architecture")
    for arch in archs:
        load_architecture(arch)
    if not modes or any(m not in GRAPH_MODES for m in modes):
        raise ConfigError(f"--graphs must list modes from {list(GRAPH_MODES)}, got {args.graphs!r}")
    frame = timing_benchmark(config, archs, modes)
    output = Path(args.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output, index=False, float_format="%.10g")
    logger.info(f"Wrote {len(frame)} timing rows to {output}")
    return 0


def cmd_run(args: Namespace) -> int:
    overrides = {name: getattr(args, name, None) for name in CONFIG_FLAGS}
    experiment_engine.run_preset(args.name, Path(args.output), overrides, args.config)
    return 0
