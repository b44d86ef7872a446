"""
Mixing sweeps over a t-grid and the visit-failure decay experiment.

A sweep simulates each replicate once: one chain trajectory from empty
checkpointed at every t of the grid, and one binary search for the first t at
which σ_drive_t visits all sites. Every t then reuses the same samples.
"""

import math
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import polars as pl
from loguru import logger

from ..chain.driving import DrivingSequence
from ..chain.sampler import stationary_density, stationary_samples
from ..core.instructions import InstructionSource
from ..core.topology import build_interval
from ..utils.parallel import run_replicas
from ..utils.seeds import derive_seed, generator
from .bounds import (
    PLUGIN_MAX_SITES,
    TVBounds,
    chain_samples,
    counting_lower,
    default_m_grid,
    first_visit_time,
    plugin_from_samples,
    upper_from_failures,
    visit_failure_prob,
)
from .hitting import hitting_tail_at
from .laws import ConfigurationLaw


SWEEP_COLUMNS = [
    "n", "lambda", "t", "lower", "upper", "p_hat", "p_lo", "p_hi",
    "m_star", "plugin", "plugin_lo", "plugin_hi",
]

SWEEP_SCHEMA = {
    "n": pl.Int64,
    "lambda": pl.Float64,
    "t": pl.Int64,
    "lower": pl.Float64,
    "upper": pl.Float64,
    "p_hat": pl.Float64,
    "p_lo": pl.Float64,
    "p_hi": pl.Float64,
    "m_star": pl.Int64,
    "plugin": pl.Float64,
    "plugin_lo": pl.Float64,
    "plugin_hi": pl.Float64,
}


def empty_sweep() -> pl.DataFrame:
    return pl.DataFrame(schema=SWEEP_SCHEMA)


def _first_visit_replica(
    task: Tuple[DrivingSequence, InstructionSource, int, int],
) -> Optional[int]:
    driving, source, t_max, replica = task
    return first_visit_time(driving, source, t_max, replica)


def mixing_sweep(
    source: InstructionSource,
    t_grid: Iterable[int],
    driving: DrivingSequence,
    reps: int,
    m_grid: Optional[Sequence[int]] = None,
    confidence: float = 0.95,
    conservative: bool = True,
    plugin: Optional[bool] = None,
    resamples: int = 1000,
    plugin_cap: int = PLUGIN_MAX_SITES,
    threads: int = 1,
) -> pl.DataFrame:
    """
    Lower, upper and (small n) plug-in TV estimates at every t of the grid.

    Args:
        source: Instruction stacks on the interval or a general topology.
        t_grid: Chain steps to evaluate.
        driving: Driving of the chain and of σ_drive_t.
        reps: Replicates for every Monte Carlo ingredient.
        m_grid: Candidate m for the upper bound (default ``default_m_grid``).
        conservative: Use confidence limits rather than point estimates.
        plugin: Force the plug-in column on/off; default on iff n <= plugin_cap.

    Returns:
        DataFrame with the columns of ``SWEEP_COLUMNS``.
    """
    log = logger.bind(component="MixingSweep")
    source.require_recorded("Mixing sweeps")
    topology = source.topology
    n = topology.n
    ts = sorted(set(int(t) for t in t_grid))
    if not ts:
        return empty_sweep()
    if ts[0] < 0:
        raise ValueError(f"t-grid entries must be >= 0, got {ts[0]}")
    with_plugin = (n <= plugin_cap) if plugin is None else plugin
    if with_plugin and n > plugin_cap:
        raise ValueError(f"Plug-in TV requested for n={n} > {plugin_cap}")

    started = time.perf_counter()
    log.info(
        f"Sweep n={n} λ={source.sleep_rate} t∈[{ts[0]},{ts[-1]}] ({len(ts)} points), "
        f"{reps} replicates, driving={driving!r}"
    )

    pi_counts, pi_masks = stationary_samples(source, reps, threads)
    chains = chain_samples(source, driving, ts, reps, threads)
    firsts = run_replicas(
        _first_visit_replica,
        [(driving, source, ts[-1], r) for r in range(reps)],
        threads,
    )
    first_times = np.asarray(
        [ts[-1] + 1 if f is None else f for f in firsts], dtype=np.int64
    )

    ms = list(m_grid) if m_grid else default_m_grid(n)
    tails = hitting_tail_at(topology, ms)

    rows = []
    for t in ts:
        failures = int((first_times > t).sum())
        upper, m_star, visit = upper_from_failures(
            failures, reps, ms, tails, confidence, conservative
        )
        chain_counts, chain_masks = chains[t]
        lower = counting_lower(pi_counts, chain_counts, t, n, confidence, conservative)
        bounds = TVBounds(
            n=n,
            sleep_rate=source.sleep_rate,
            t=t,
            lower=lower.lower,
            upper=upper,
            p_hat=visit.p_hat,
            p_lo=visit.lo,
            p_hi=visit.hi,
            m_star=m_star,
            conservative=conservative,
        )
        if with_plugin:
            estimate = plugin_from_samples(
                pi_masks, chain_masks, n, generator(source.seed, "bootstrap", t),
                resamples, confidence,
            )
            bounds.plugin, bounds.plugin_lo, bounds.plugin_hi = (
                estimate.tv, estimate.lo, estimate.hi,
            )
        rows.append(bounds.as_row())

    frame = pl.from_dicts(rows, schema=SWEEP_SCHEMA).select(SWEEP_COLUMNS)
    log.info(f"Sweep n={n} done in {time.perf_counter() - started:.1f}s")
    return frame


@dataclass
class DecayReport:
    """Visit-failure frequency at t = (ρ̂ + offset)·n across sizes."""
    frame: pl.DataFrame
    slope: float

    @property
    def decreasing(self) -> bool:
        p = self.frame["p_hat"].to_list()
        return all(b <= a for a, b in zip(p, p[1:])) and self.slope < 0


def visit_failure_decay(
    n_grid: Sequence[int],
    sleep_rate: float,
    offset: float,
    reps: int,
    seed: int,
    driving: Optional[DrivingSequence] = None,
    density_reps: Optional[int] = None,
    confidence: float = 0.95,
    threads: int = 1,
) -> DecayReport:
    """
    Estimate p̂(n) = P(σ_drive_t fails to visit V) at t = ⌈(ρ̂(n) + offset)·n⌉.

    ``slope`` is the least-squares slope of log p̂ against n over the sizes with
    p̂ > 0 (NaN when fewer than two remain).
    """
    log = logger.bind(component="VisitDecay")
    driving = driving or DrivingSequence.central()
    rows = []
    for n in sorted(set(int(x) for x in n_grid)):
        source = InstructionSource(
            build_interval(n), sleep_rate, derive_seed(seed, "size", n)
        )
        density = stationary_density(source, density_reps or reps, confidence, threads)
        t = math.ceil((density.mean + offset) * n)
        law = ConfigurationLaw.driven(driving, t, source.topology)
        visit = visit_failure_prob(law, source, reps, confidence, threads)
        log.info(f"n={n}: ρ̂={density.mean:.4f}, t={t}, p̂={visit.p_hat:.4g}")
        rows.append({
            "n": n,
            "rho_hat": density.mean,
            "t": t,
            "p_hat": visit.p_hat,
            "p_lo": visit.lo,
            "p_hi": visit.hi,
        })

    frame = pl.DataFrame(rows)
    positive = frame.filter(pl.col("p_hat") > 0)
    slope = float("nan")
    if positive.height >= 2:
        slope = float(
            np.polyfit(positive["n"].to_numpy(), np.log(positive["p_hat"].to_numpy()), 1)[0]
        )
    return DecayReport(frame=frame, slope=slope)
