#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""gnflow command line: generate | train | eval | study | bench | run"""

import argparse
import logging
import sys
from typing import List, Optional

from gnflow import __version__
from gnflow.cli import commands
from gnflow.cli.settings import configure_logging, load_environment
from gnflow.errors import GNFlowError

logger = logging.getLogger("cli")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", default=None, help="JSON preset name or path")
    parser.add_argument("--config", default=None, help="flat key = value config file")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--workers", type=int, default=None, help="worker threads")
    parser.add_argument("--seed", type=int, default=None, help="defaults to $GNFLOW_SEED, then 0")


def _data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--system", default=None, choices=["sink", "triangle", "sawtooth", "square"])
    parser.add_argument("--nodes", type=int, default=None)
    parser.add_argument("--times", type=int, default=None, help="observations per sample")
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--density", type=float, default=None)
    parser.add_argument("--mask-rate", dest="mask_rate", type=float, default=None)


def _train_flags(parser: argparse.ArgumentParser) -> None:
    # arch is validated by ExperimentConfig so the error lists the registered set
    parser.add_argument("--arch", default=None)
    parser.add_argument("--graph", default=None, choices=["learned", "truth", "none"])
    parser.add_argument("--task", default=None, choices=["forecast", "smoothing", "filtering"])
    parser.add_argument("--hidden", type=int, default=None)
    parser.add_argument("--latent-dim", dest="latent_dim", type=int, default=None)
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--patience", type=int, default=None)
    parser.add_argument("--outer-iterations", dest="outer_iterations", type=int, default=None)
    parser.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    parser.add_argument("--lr", type=float, default=None)
    parser.add_argument("--split", default=None, help="train,val,test ratios, e.g. 0.6,0.2,0.2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gnflow", description="Graph-conditioned neural flows")
    parser.add_argument("--version", action="version", version=f"gnflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a synthetic dataset and its ground-truth DAG")
    _common(p)
    _data_flags(p)
    p.add_argument("--output", required=True, help="dataset file; the DAG goes to <stem>.dag.csv")
    p.set_defaults(handler=commands.cmd_generate)

    p = sub.add_parser("train", help="train on a dataset file")
    _common(p)
    p.add_argument("--system", default=None, help=argparse.SUPPRESS)
    _train_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--output", required=True, help="run directory")
    p.set_defaults(handler=commands.cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on the test split of a dataset")
    _common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--truth", default=None, help="ground-truth DAG CSV for graph metrics")
    p.add_argument("--threshold", type=float, default=0.3, help="edge threshold for graph metrics")
    p.add_argument("--output", required=True, help="metrics JSON file")
    p.set_defaults(handler=commands.cmd_eval)

    p = sub.add_parser("study", help="graph quality against DAG perturbation strength")
    _common(p)
    _data_flags(p)
    _train_flags(p)
    p.add_argument("--sigmas", default="0,0.1,0.2,0.3")
    p.add_argument("--seeds", default=None, help="comma-separated seeds")
    p.add_argument("--output", required=True, help="results CSV")
    p.set_defaults(handler=commands.cmd_study)

    p = sub.add_parser("bench", help="seconds per epoch by architecture and graph mode")
    _common(p)
    _data_flags(p)
    _train_flags(p)
    p.add_argument("--archs", default="resnet,gru,coupling")
    p.add_argument("--graphs", default="learned,none")
    p.add_argument("--output", required=True, help="timing CSV")
    p.set_defaults(handler=commands.cmd_bench)

    p = sub.add_parser("run", help="run a JSON preset through the experiment engine")
    p.add_argument("name", help="preset name under gnflow/presets, or a path")
    _common(p)
    _data_flags(p)
    _train_flags(p)
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(handler=commands.cmd_run)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_environment()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except GNFlowError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
