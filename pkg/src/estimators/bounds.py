"""
Executable total-variation bounds for the driven chain started from empty.

Upper bound (street-sweeper argument), valid for every starting configuration
and every m >= 1:

    d(t) <= m · P(σ_drive_t does not visit all sites) + P(H >= m)

Counting lower bound: a chain started empty holds at most t particles at
step t, so every threshold k on the particle count separates the two laws:

    d(t) >= max_k | P_π(count >= k) − P_t(count >= k) |

In conservative mode (the default) the visit-failure probability enters the
upper bound through its upper Clopper–Pearson limit, and the lower bound
through lower limits of the separating differences.
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..chain.chain import sample_chain_endpoint
from ..chain.driving import DrivingKind, DrivingSequence
from ..chain.sampler import stationary_samples
from ..core.configuration import Configuration
from ..core.engine import State, visits_all
from ..core.errors import StateSpaceTooLargeError
from ..core.instructions import InstructionSource
from ..core.topology import Topology
from ..utils.parallel import run_replicas
from ..utils.seeds import generator
from .hitting import hitting_tail_at
from .laws import ConfigurationLaw
from .stats import bootstrap_tv, clopper_pearson, empirical_tv


PLUGIN_MAX_SITES = 10
PLUGIN_MIN_REPS = 10_000


@dataclass
class VisitEstimate:
    """Monte Carlo frequency of failing to visit all sites."""
    failures: int
    reps: int
    p_hat: float
    lo: float
    hi: float


@dataclass
class TVBounds:
    """One row of a mixing sweep."""
    n: int
    sleep_rate: float
    t: int
    lower: Optional[float] = None
    upper: Optional[float] = None
    p_hat: Optional[float] = None
    p_lo: Optional[float] = None
    p_hi: Optional[float] = None
    m_star: Optional[int] = None
    plugin: Optional[float] = None
    plugin_lo: Optional[float] = None
    plugin_hi: Optional[float] = None
    conservative: bool = True

    def as_row(self) -> Dict[str, object]:
        row = asdict(self)
        row["lambda"] = row.pop("sleep_rate")
        row.pop("conservative")
        return row


@dataclass
class CountingLowerBound:
    lower: float
    k_star: int


@dataclass
class PluginEstimate:
    """Plug-in TV over stable configurations with a bootstrap interval."""
    tv: float
    lo: float
    hi: float
    reps: int
    bias_scale: float


# ──────────────────────────────────────────────────────────────────────────────
# Visit failures
# ──────────────────────────────────────────────────────────────────────────────

def default_m_grid(n: int) -> List[int]:
    """{n, n², n³} together with every power of two up to n³."""
    top = n**3
    grid = {n, n**2, top}
    power = 1
    while power <= top:
        grid.add(power)
        power *= 2
    return sorted(grid)


def _visit_replica(task: Tuple[ConfigurationLaw, InstructionSource, int]) -> bool:
    law, source, replica = task
    config = law.sample(source.topology, replica)
    visited, _ = visits_all(State.initial(config), source.derive("replica", replica))
    return not visited


def visit_failure_prob(
    law: ConfigurationLaw,
    source: InstructionSource,
    reps: int,
    confidence: float = 0.95,
    threads: int = 1,
) -> VisitEstimate:
    """Frequency with which a configuration drawn from ``law`` fails to visit V."""
    source.require_recorded("Visit estimates")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    tasks = [(law, source, r) for r in range(reps)]
    failures = int(sum(run_replicas(_visit_replica, tasks, threads)))
    lo, hi = clopper_pearson(failures, reps, confidence)
    return VisitEstimate(failures, reps, failures / reps, lo, hi)


def _driven_indices(
    driving: DrivingSequence,
    topology: Topology,
    t_max: int,
    replica: int,
) -> np.ndarray:
    if driving.kind is DrivingKind.CENTRAL:
        return np.full(t_max, topology.index_of(topology.center()), dtype=np.int64)
    sites = driving.derive("driving", replica).sites_up_to(t_max, topology)
    return np.asarray(topology.indices_of(sites), dtype=np.int64)


def first_visit_time(
    driving: DrivingSequence,
    source: InstructionSource,
    t_max: int,
    replica: int = 0,
) -> Optional[int]:
    """
    Least t <= t_max such that σ_drive_t visits every site, or None.

    Adding active particles never shrinks the visit set when the stacks are
    fixed, so visiting is monotone in t and a binary search suffices.

    Raises:
        DomainError: ``source`` is ephemeral.
    """
    source.require_recorded("First-visit times")
    topology = source.topology
    stacks = source.derive("replica", replica)
    indices = _driven_indices(driving, topology, t_max, replica)

    def covers(t: int) -> bool:
        config = Configuration.from_counts(np.bincount(indices[:t], minlength=topology.n))
        return visits_all(State.initial(config), stacks)[0]

    if t_max < 1 or not covers(t_max):
        return None
    lo, hi = 0, t_max
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if covers(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ──────────────────────────────────────────────────────────────────────────────
# Bound arithmetic on simulated samples
# ──────────────────────────────────────────────────────────────────────────────

def upper_from_failures(
    failures: int,
    reps: int,
    ms: Sequence[int],
    tails: np.ndarray,
    confidence: float = 0.95,
    conservative: bool = True,
) -> Tuple[float, int, VisitEstimate]:
    """min over m of m·p + tail[m], with p the upper limit or the point estimate."""
    lo, hi = clopper_pearson(failures, reps, confidence)
    estimate = VisitEstimate(failures, reps, failures / reps, lo, hi)
    p = hi if conservative else estimate.p_hat
    values = np.asarray(ms, dtype=float) * p + np.asarray(tails, dtype=float)
    best = int(np.argmin(values))
    return float(values[best]), int(ms[best]), estimate


def counting_lower(
    stationary_counts: np.ndarray,
    chain_counts: np.ndarray,
    t: int,
    n: int,
    confidence: float = 0.95,
    conservative: bool = True,
) -> CountingLowerBound:
    """Best separating count threshold between π and the chain at step t."""
    stationary_counts = np.asarray(stationary_counts)
    chain_counts = np.asarray(chain_counts)
    reps_pi, reps_t = len(stationary_counts), len(chain_counts)

    best, k_star = 0.0, 0
    for k in range(1, n + 1):
        hits_pi = int((stationary_counts >= k).sum())
        hits_t = 0 if k > t else int((chain_counts >= k).sum())
        if conservative:
            pi_lo, pi_hi = clopper_pearson(hits_pi, reps_pi, confidence)
            if k > t:
                t_lo = t_hi = 0.0
            else:
                t_lo, t_hi = clopper_pearson(hits_t, reps_t, confidence)
            value = max(pi_lo - t_hi, t_lo - pi_hi, 0.0)
        else:
            value = abs(hits_pi / reps_pi - hits_t / reps_t)
        if value > best:
            best, k_star = value, k

    return CountingLowerBound(lower=min(best, 1.0), k_star=k_star)


def plugin_from_samples(
    stationary_masks: Sequence[Hashable],
    chain_masks: Sequence[Hashable],
    n: int,
    rng: np.random.Generator,
    resamples: int = 1000,
    confidence: float = 0.95,
) -> PluginEstimate:
    tv = empirical_tv(chain_masks, stationary_masks)
    lo, hi = bootstrap_tv(chain_masks, stationary_masks, resamples, rng, confidence)
    reps = min(len(chain_masks), len(stationary_masks))
    return PluginEstimate(tv, lo, hi, reps, math.sqrt(2**n / reps))


# ──────────────────────────────────────────────────────────────────────────────
# Chain replicas
# ──────────────────────────────────────────────────────────────────────────────

def _chain_replica(
    task: Tuple[InstructionSource, DrivingSequence, Tuple[int, ...], int],
) -> List[Tuple[int, int]]:
    source, driving, checkpoints, replica = task
    endpoints = sample_chain_endpoint(
        Configuration.empty(source.topology.n),
        checkpoints,
        driving.derive("driving", replica),
        source.derive("replica", replica),
    )
    return [(endpoints[t].total(), endpoints[t].sleeping_mask()) for t in checkpoints]


def chain_samples(
    source: InstructionSource,
    driving: DrivingSequence,
    checkpoints: Iterable[int],
    reps: int,
    threads: int = 1,
) -> Dict[int, Tuple[np.ndarray, List[int]]]:
    """Per checkpoint t: (counts, sleeping masks) of σ_t over ``reps`` chains from empty."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    checkpoints = tuple(sorted(set(int(t) for t in checkpoints)))
    tasks = [(source, driving, checkpoints, r) for r in range(reps)]
    per_replica = run_replicas(_chain_replica, tasks, threads)

    samples = {}
    for i, t in enumerate(checkpoints):
        counts = np.asarray([row[i][0] for row in per_replica], dtype=np.int64)
        samples[t] = (counts, [row[i][1] for row in per_replica])
    return samples


# ──────────────────────────────────────────────────────────────────────────────
# Single-t estimators
# ──────────────────────────────────────────────────────────────────────────────

def tv_upper_bound(
    source: InstructionSource,
    t: int,
    driving: DrivingSequence,
    reps: int,
    m_grid: Optional[Sequence[int]] = None,
    confidence: float = 0.95,
    conservative: bool = True,
    threads: int = 1,
) -> TVBounds:
    """Street-sweeper upper bound on d(t), minimized over ``m_grid``."""
    source.require_recorded("Upper bounds")
    topology = source.topology
    ms = list(m_grid) if m_grid else default_m_grid(topology.n)
    if any(m < 1 for m in ms):
        raise ValueError(f"m-grid entries must be >= 1, got {ms}")

    law = ConfigurationLaw.driven(driving, t, topology)
    visit = visit_failure_prob(law, source, reps, confidence, threads)
    upper, m_star, _ = upper_from_failures(
        visit.failures, reps, ms, hitting_tail_at(topology, ms), confidence, conservative
    )
    return TVBounds(
        n=topology.n,
        sleep_rate=source.sleep_rate,
        t=t,
        upper=upper,
        p_hat=visit.p_hat,
        p_lo=visit.lo,
        p_hi=visit.hi,
        m_star=m_star,
        conservative=conservative,
    )


def tv_lower_bound_counting(
    source: InstructionSource,
    t: int,
    reps: int,
    driving: Optional[DrivingSequence] = None,
    confidence: float = 0.95,
    conservative: bool = True,
    threads: int = 1,
) -> CountingLowerBound:
    """Counting lower bound on d(t) for the chain started empty."""
    driving = driving or DrivingSequence.central()
    pi_counts, _ = stationary_samples(source, reps, threads)
    chain_counts, _ = chain_samples(source, driving, [t], reps, threads)[t]
    return counting_lower(pi_counts, chain_counts, t, source.topology.n, confidence, conservative)


def tv_plugin_small_n(
    source: InstructionSource,
    t: int,
    driving: DrivingSequence,
    reps: int,
    resamples: int = 1000,
    confidence: float = 0.95,
    max_sites: int = PLUGIN_MAX_SITES,
    threads: int = 1,
) -> PluginEstimate:
    """
    Empirical TV between σ_t (from empty) and exact stationary samples.

    The estimator is biased upward by roughly √(2ⁿ/reps); that scale is
    reported as ``bias_scale``.
    """
    n = source.topology.n
    if n > max_sites:
        raise StateSpaceTooLargeError(
            f"Plug-in TV is limited to n <= {max_sites} (2^{n} stable configurations)"
        )
    if reps < PLUGIN_MIN_REPS:
        logger.warning(
            f"Plug-in TV with {reps} < {PLUGIN_MIN_REPS} replicates; "
            f"bias scale {math.sqrt(2**n / reps):.3f}"
        )
    _, pi_masks = stationary_samples(source, reps, threads)
    _, chain_masks = chain_samples(source, driving, [t], reps, threads)[t]
    rng = generator(source.seed, "bootstrap", t)
    return plugin_from_samples(pi_masks, chain_masks, n, rng, resamples, confidence)
