#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Process-level settings: .env loading and logging setup."""

import logging
import os
from typing import Optional

from dotenv import load_dotenv

LOG_LEVEL_ENV = "GNFLOW_LOG_LEVEL"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(level: Optional[str] = None) -> int:
    """Configure the root logger once; flag beats GNFLOW_LOG_LEVEL beats INFO"""
    name = (level or os.environ.get(LOG_LEVEL_ENV) or "INFO").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        numeric = logging.INFO
    logging.basicConfig(level=numeric, format=LOG_FORMAT)
    logging.getLogger().setLevel(numeric)
    return numeric


def load_environment() -> None:
    # existing environment variables win over .env
    load_dotenv(override=False)
