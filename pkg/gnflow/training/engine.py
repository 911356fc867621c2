#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Experiment engine: runs presets and fans out independent training jobs.

A preset is a JSON file under gnflow/presets with an `executor` (dotted
path of a callable taking (config, output_dir)) and a `config` mapping.
Jobs run on worker threads; each job owns its model and output directory.
"""

import importlib
import logging
import threading
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from gnflow.errors import ConfigError, GNFlowError
from gnflow.training.config import PRESETS_DIR, load_config, load_preset

logger = logging.getLogger("experiment_engine")

Job = Tuple[str, Callable[..., Any], Mapping[str, Any]]


class ExperimentEngine:
    """Loads presets, resolves their executors and runs jobs on threads"""

    def __init__(self, presets_dir: Path = PRESETS_DIR):
        self.presets_dir = Path(presets_dir)
        self.presets: Dict[str, Dict[str, Any]] = {}
        self.results: Dict[str, Any] = {}
        self.errors: Dict[str, BaseException] = {}
        self.timings: Dict[str, float] = {}
        self._lock = threading.Lock()

    def load_preset(self, name: str) -> Dict[str, Any]:
        if name not in self.presets:
            self.presets[name] = load_preset(name)
            logger.info(f"Loaded preset: {name}")
        return self.presets[name]

    def list_presets(self) -> List[str]:
        return sorted(p.stem for p in self.presets_dir.glob("*.json"))

    @staticmethod
    def resolve_executor(executor_path: str) -> Callable[..., Any]:
        """Import `package.module.callable`"""
        try:
            module_path, attr = executor_path.rsplit('.', 1)
            module = importlib.import_module(module_path)
            return getattr(module, attr)
        except (ValueError, ImportError, AttributeError) as e:
            raise ConfigError(f"cannot resolve executor {executor_path!r}: {e}") from None

    def run_preset(self, name: str, output_dir: Path, overrides: Optional[Mapping[str, Any]] = None,
                   config_file: Optional[str] = None) -> Any:
        """Run the executor named by preset `name`"""
        preset = self.load_preset(name)
        executor_path = preset.get('executor')
        if not executor_path:
            raise ConfigError(f"preset {name} has no executor")
        executor = self.resolve_executor(executor_path)
        config = load_config(preset=name, config_file=config_file, overrides=overrides)
        logger.info(f"Running preset {name} with {executor_path}")
        return executor(config, Path(output_dir))

    def _run_job(self, job_id: str, func: Callable[..., Any], kwargs: Mapping[str, Any],
                 slots: threading.Semaphore, sink: Dict[str, Dict[str, Any]]) -> None:
        with slots:
            started = time.perf_counter()
            try:
                result = func(**kwargs)
                with self._lock:
                    sink["results"][job_id] = result
            except Exception as e:
                logger.error(f"Job {job_id} failed: {e}")
                with self._lock:
                    sink["errors"][job_id] = e
            finally:
                with self._lock:
                    sink["timings"][job_id] = time.perf_counter() - started
        logger.debug(f"Job finished: {job_id}")

    def run_jobs(self, jobs: List[Job], workers: int = 1) -> Dict[str, Any]:
        """Run independent jobs with at most `workers` at a time

        Returns results keyed by job id in submission order. The first
        failure is re-raised after all jobs have finished.
        """
        sink: Dict[str, Dict[str, Any]] = {"results": {}, "errors": {}, "timings": {}}
        if workers <= 1:
            for job_id, func, kwargs in jobs:
                self._run_job(job_id, func, kwargs, threading.Semaphore(1), sink)
        else:
            slots = threading.Semaphore(workers)
            threads = []
            for job_id, func, kwargs in jobs:
                thread = threading.Thread(target=self._run_job, args=(job_id, func, kwargs, slots, sink),
                                          name=f"Job-{job_id}", daemon=True)
                thread.start()
                threads.append(thread)
            for thread in threads:
                thread.join()
        with self._lock:
            self.results, self.errors, self.timings = sink["results"], sink["errors"], sink["timings"]
        for job_id, _, _ in jobs:
            if job_id in sink["errors"]:
                error = sink["errors"][job_id]
                if isinstance(error, GNFlowError):
                    raise error
                raise RuntimeError(f"job {job_id} failed: {error}") from error
        return {job_id: sink["results"][job_id] for job_id, _, _ in jobs}


# global engine instance
experiment_engine = ExperimentEngine()
