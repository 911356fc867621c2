#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Process entry point: loads .env, configures logging and hands the command
line to gnflow. `python run.py train --data runs/data.txt --output runs/a`
is equivalent to `python -m gnflow ...`.
"""

import signal
import sys

from dotenv import load_dotenv

# load environment variables before the package reads GNFLOW_SEED
load_dotenv()

from gnflow.cli.main import main  # noqa: E402


def signal_handler(sig, frame):
    """Turn SIGTERM into KeyboardInterrupt so the CLI can log and exit"""
    raise KeyboardInterrupt


if __name__ == "__main__":
    signal.signal(signal.SIGTERM, signal_handler)
    sys.exit(main())
