"""
ARW Lab - driven-dissipative activated random walk on finite graphs.

Packages:
- core: topologies, configurations, instruction stacks, toppling engine (NumPy)
- chain: driven-dissipative chain and exact stationary sampling
- estimators: hitting tails, TV bounds, mixing sweeps, cutoff location (Polars + DuckDB SQL)
- oracle: brute-force and coupling verifiers with JSON verdicts
"""

from .chain import DrivingSequence, run_chain, sample_stationary, stationary_density
from .core import InstructionSource, build_general, build_interval, stabilize
from .estimators import locate_cutoff, mixing_sweep
from .oracle import run_suite

__all__ = [
    "DrivingSequence",
    "run_chain",
    "sample_stationary",
    "stationary_density",
    "InstructionSource",
    "build_general",
    "build_interval",
    "stabilize",
    "locate_cutoff",
    "mixing_sweep",
    "run_suite",
]
