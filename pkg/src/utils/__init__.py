"""
Shared utilities for the ARW lab.
"""

from .config import ExperimentConfig, LabConfig, load_config
from .io import emit_plotdata, format_floats, write_json, write_table
from .parallel import run_replicas
from .run_report import generate_run_report
from .seeds import CounterStream, derive_seed, generator

__all__ = [
    "ExperimentConfig",
    "LabConfig",
    "load_config",
    "emit_plotdata",
    "format_floats",
    "write_json",
    "write_table",
    "run_replicas",
    "generate_run_report",
    "CounterStream",
    "derive_seed",
    "generator",
]
