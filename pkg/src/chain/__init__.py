"""
Driven-dissipative chain, driving sequences and exact stationary sampling.
"""

from .chain import ChainRun, chain_step, run_chain, sample_chain_endpoint
from .driving import DrivingKind, DrivingSequence
from .sampler import (
    DensityEstimate,
    sample_stationary,
    stationary_counts,
    stationary_density,
    stationary_samples,
)

__all__ = [
    "ChainRun",
    "chain_step",
    "run_chain",
    "sample_chain_endpoint",
    "DrivingKind",
    "DrivingSequence",
    "DensityEstimate",
    "sample_stationary",
    "stationary_counts",
    "stationary_density",
    "stationary_samples",
]
