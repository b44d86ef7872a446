"""
Boundary-exit experiments on the interval.

A configuration of active particles whose right-weighted sum Σ j·σ(j) is at
least (ρ + ε)·n²/2 sends a particle out through the right endpoint with high
probability when stabilized; the left version uses Σ (n − j + 1)·σ(j).
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from ..core.configuration import Configuration
from ..core.engine import State, stabilize
from ..core.errors import DomainError
from ..core.instructions import InstructionSource
from ..core.topology import BoundarySide
from ..utils.parallel import run_replicas
from .laws import ConfigurationLaw
from .stats import clopper_pearson


def weighted_sum(config: Configuration, side: BoundarySide) -> int:
    """Right: Σ j·|σ(j)|.  Left: Σ (n − j + 1)·|σ(j)|  (sites j = 1..n)."""
    side = BoundarySide(side)
    if side is BoundarySide.SINK:
        raise DomainError("Weighted sums are defined for the LEFT and RIGHT sides")
    if config.has_sleeping():
        raise DomainError("Weighted sums are defined for configurations of active particles")
    n = config.n
    positions = np.arange(1, n + 1, dtype=np.int64)
    weights = positions if side is BoundarySide.RIGHT else n - positions + 1
    return int((weights * config.values).sum())


@dataclass
class ExitEstimate:
    """Exit frequencies and the weighted-sum statistics of the sampled configurations."""
    side: BoundarySide
    reps: int
    exits: int
    frequency: float
    lo: float
    hi: float
    any_exit_frequency: float
    weighted_mean: float
    weighted_min: int
    weighted_max: int
    hypothesis_rate: Optional[float] = None
    threshold: Optional[float] = None


def _exit_replica(
    task: Tuple[ConfigurationLaw, InstructionSource, BoundarySide, int],
) -> Tuple[int, int, int]:
    law, source, side, replica = task
    config = law.sample(source.topology, replica)
    report = stabilize(State.initial(config), source.derive("replica", replica))
    return report.exits_on(side), report.total_exits, weighted_sum(config, side)


def exit_probability(
    law: ConfigurationLaw,
    side: BoundarySide,
    source: InstructionSource,
    reps: int,
    confidence: float = 0.95,
    rho_hat: Optional[float] = None,
    epsilon: Optional[float] = None,
    threads: int = 1,
) -> ExitEstimate:
    """
    Frequency with which stabilizing a configuration from ``law`` sends at
    least one particle out through ``side``.

    When ``rho_hat`` and ``epsilon`` are given, ``hypothesis_rate`` is the
    fraction of replicates whose weighted sum reaches (ρ̂ + ε)·n²/2.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    side = BoundarySide(side)
    if not source.topology.is_interval:
        raise DomainError("Exit experiments run on the interval topology")

    results = run_replicas(
        _exit_replica, [(law, source, side, r) for r in range(reps)], threads
    )
    side_exits = np.asarray([r[0] for r in results])
    total_exits = np.asarray([r[1] for r in results])
    sums = np.asarray([r[2] for r in results], dtype=np.int64)

    hits = int((side_exits >= 1).sum())
    lo, hi = clopper_pearson(hits, reps, confidence)

    hypothesis_rate = threshold = None
    if rho_hat is not None and epsilon is not None:
        n = source.topology.n
        threshold = (rho_hat + epsilon) * n * n / 2.0
        hypothesis_rate = float((sums >= threshold).mean())

    estimate = ExitEstimate(
        side=side,
        reps=reps,
        exits=hits,
        frequency=hits / reps,
        lo=lo,
        hi=hi,
        any_exit_frequency=float((total_exits >= 1).mean()),
        weighted_mean=float(sums.mean()),
        weighted_min=int(sums.min()),
        weighted_max=int(sums.max()),
        hypothesis_rate=hypothesis_rate,
        threshold=threshold,
    )
    logger.debug(
        f"Exit {side.value}: {hits}/{reps} ({estimate.frequency:.3f}), "
        f"weighted sum mean {estimate.weighted_mean:.1f}"
    )
    return estimate
