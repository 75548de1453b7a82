"""Experiment configs, the run dispatcher, acceptance suites and the CLI."""

from .cli import main
from .config import KINDS, ExperimentConfig, load_config, validate_config
from .run import jsonable, presets, run
from .suites import SUITES, acceptance_suite

__all__ = [
    "ExperimentConfig",
    "KINDS",
    "SUITES",
    "acceptance_suite",
    "jsonable",
    "load_config",
    "main",
    "presets",
    "run",
    "validate_config",
]
