"""
Oracle checks on recorded instruction stacks.

Each check returns a CheckResult; property violations are reported, never
raised. Preconditions that the caller controls (wrong source mode, sleeping
particles where only active ones make sense) still raise.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..chain.chain import run_chain
from ..chain.driving import DrivingSequence
from ..chain.sampler import sample_stationary
from ..core.configuration import SLEEPING, Configuration, Odometer
from ..core.engine import (
    State,
    activate,
    apply_instruction,
    jump_config,
    jump_rounds_to_empty,
    jump_trajectory,
    stabilize,
    visits,
    visits_all,
)
from ..core.errors import BudgetExceededError, DomainError, StateSpaceTooLargeError
from ..core.instructions import InstructionSource
from ..estimators.stats import empirical_tv
from .enumerate import DEFAULT_NODE_BUDGET, enumerate_legal_stabilizations
from .instances import OracleInstance
from .verdict import CheckResult, Outcome


MAX_LAW_SITES = 10


def _require_recorded(source: InstructionSource) -> None:
    source.require_recorded("Oracle checks")


def _passed(**details: Any) -> CheckResult:
    return CheckResult(Outcome.PASSED, details=details)


def _failed(message: str, **details: Any) -> CheckResult:
    return CheckResult(Outcome.FAILED, message, details)


# ──────────────────────────────────────────────────────────────────────────────
# Abelian property and least action
# ──────────────────────────────────────────────────────────────────────────────

def check_engine_agreement(
    instance: OracleInstance,
    budget: int = DEFAULT_NODE_BUDGET,
) -> CheckResult:
    """All legal stabilizations in U agree, and agree with the engine."""
    _require_recorded(instance.source)
    outcomes = enumerate_legal_stabilizations(instance, budget=budget)
    report = stabilize(instance.state, instance.source, instance.region)
    if len(outcomes) != 1:
        return _failed(
            f"{len(outcomes)} distinct legal stabilizations",
            outcomes=[[s.config.to_json(), s.odometer.to_json()] for s in outcomes],
        )
    if report.final not in outcomes:
        expected = next(iter(outcomes))
        return _failed(
            "Engine stabilization differs from enumeration",
            engine=[report.final.config.to_json(), report.final.odometer.to_json()],
            enumerated=[expected.config.to_json(), expected.odometer.to_json()],
        )
    return _passed(topples=report.topple_count)


def _acceptable_stabilization(
    instance: OracleInstance,
    rng: np.random.Generator,
    illegal_rate: float,
    budget: int,
) -> tuple:
    """Random acceptable toppling sequence in U until stable on U."""
    topology = instance.topology
    source = instance.source
    region = topology.indices_of(instance.region)
    vals = instance.state.config.to_list()
    odo = instance.state.odometer.to_list()
    illegal = 0

    for _ in range(budget):
        active = [v for v in region if vals[v] >= 1]
        sleeping = [v for v in region if vals[v] == SLEEPING]
        if not active:
            if not sleeping or rng.random() >= illegal_rate:
                break
            v = sleeping[int(rng.integers(len(sleeping)))]
            illegal += 1
        elif sleeping and rng.random() < illegal_rate:
            v = sleeping[int(rng.integers(len(sleeping)))]
            illegal += 1
        else:
            v = active[int(rng.integers(len(active)))]
        odo[v] += 1
        apply_instruction(vals, v, source.code(v, odo[v]), topology, {})
    else:
        raise BudgetExceededError(f"Acceptable sequence not stable after {budget} topplings")

    return Configuration(vals), Odometer(odo), illegal


def check_least_action(
    instance: OracleInstance,
    trials: int,
    rng: np.random.Generator,
    illegal_rate: float = 0.3,
    budget: int = DEFAULT_NODE_BUDGET,
) -> CheckResult:
    """
    Every acceptable toppling sequence that ends stable on U uses at least the
    legal stabilizing odometer at every site.
    """
    _require_recorded(instance.source)
    legal = stabilize(instance.state, instance.source, instance.region).final.odometer

    strict = 0
    for trial in range(trials):
        config, odometer, illegal = _acceptable_stabilization(
            instance, rng, illegal_rate, budget
        )
        if not odometer.dominates(legal):
            return _failed(
                "Acceptable odometer does not dominate the legal one",
                trial=trial,
                acceptable=odometer.to_json(),
                legal=legal.to_json(),
            )
        if illegal == 0 and odometer != legal:
            return _failed(
                "Legal sequence ended with a different odometer",
                trial=trial,
                acceptable=odometer.to_json(),
                legal=legal.to_json(),
            )
        strict += odometer.strictly_dominates(legal)

    return _passed(trials=trials, strict=strict)


# ──────────────────────────────────────────────────────────────────────────────
# Preemptive toppling
# ──────────────────────────────────────────────────────────────────────────────

def check_preemptive_abelian(instance: OracleInstance, site) -> CheckResult:
    """
    If v is visited, activating v first leaves the stabilized state unchanged;
    otherwise the activated stabilization strictly dominates.
    """
    _require_recorded(instance.source)
    topology = instance.topology
    state, source = instance.state, instance.source
    v = topology.index_of(site)
    if state.config[v] == 0:
        return CheckResult(Outcome.SKIPPED, f"Site {site!r} holds no particle")

    visited = visits(state, site, source)
    base = stabilize(state, source).final
    woken = stabilize(activate(state, [site], topology), source).final

    same = woken == base
    strict = woken.odometer.strictly_dominates(base.odometer)
    branch = "equal" if visited else "strict"
    if visited and same and not strict:
        return _passed(branch=branch)
    if not visited and strict and not same:
        return _passed(branch=branch)
    return _failed(
        f"Dichotomy broken at {site!r}: visited={visited}, equal={same}, strict={strict}",
        base=[base.config.to_json(), base.odometer.to_json()],
        activated=[woken.config.to_json(), woken.odometer.to_json()],
    )


def check_preemptive_jump(
    sigma: Configuration,
    tau: Configuration,
    odometer: Odometer,
    source: InstructionSource,
) -> CheckResult:
    """
    If (τ, f) visits supp σ, jumping the particles of σ first does not change
    the stabilization of (σ + τ, f). Instances violating the hypothesis are
    skipped.
    """
    _require_recorded(source)
    if tau.has_sleeping():
        raise DomainError("τ must consist of active particles")
    topology = source.topology

    carrier = State(tau, odometer)
    for i in sigma.support():
        if not visits(carrier, topology.label(i), source):
            return CheckResult(
                Outcome.SKIPPED, f"(τ, f) does not visit {topology.label(i)!r}"
            )

    combined = State(sigma + tau, odometer)
    direct = stabilize(combined, source).final
    jumped = stabilize(jump_config(combined, sigma, source), source).final
    if jumped != direct:
        return _failed(
            "Jumping σ changed the stabilized state",
            direct=[direct.config.to_json(), direct.odometer.to_json()],
            jumped=[jumped.config.to_json(), jumped.odometer.to_json()],
        )
    return _passed()


# ──────────────────────────────────────────────────────────────────────────────
# Street sweeper
# ──────────────────────────────────────────────────────────────────────────────

@dataclass
class SweeperLog:
    """Event counts of the street-sweeper coupling over all replicates."""
    replicates: int
    m: int
    good: int = 0
    coupled_equal: int = 0
    violations: int = 0
    first_violation: Optional[int] = None
    sweep_misses: int = 0
    long_car_runs: int = 0
    event_failures: List[int] = field(default_factory=list)
    n_values: List[int] = field(default_factory=list)
    tv: float = 0.0
    bound: float = 0.0
    slack: float = 0.0

    @property
    def p_hat(self) -> float:
        return self.sweep_misses / self.replicates

    @property
    def q_hat(self) -> float:
        return self.long_car_runs / self.replicates

    def as_dict(self) -> Dict[str, Any]:
        return {
            "replicates": self.replicates,
            "m": self.m,
            "good_events": self.good,
            "coupled_equal": self.coupled_equal,
            "coupling_violations": self.violations,
            "first_violation": self.first_violation,
            "p_hat": self.p_hat,
            "p_n_ge_m": self.q_hat,
            "mean_N": float(np.mean(self.n_values)) if self.n_values else 0.0,
            "tv": self.tv,
            "bound": self.bound,
            "slack": self.slack,
        }


def street_sweeper_replicate(
    sweep: Configuration,
    car: Configuration,
    m: int,
    source: InstructionSource,
) -> Dict[str, Any]:
    """
    One coupled replicate: the car particles are jumped k = 0..m−1 rounds
    (odometers f_k), E_k is the event that (σ_sweep, f_k) visits V and N the
    number of rounds until the car particles are gone.
    """
    trajectory = jump_trajectory(car, source, m - 1)
    events = [
        visits_all(State(sweep, state.odometer), source)[0] for state in trajectory
    ]
    rounds = jump_rounds_to_empty(car, source)

    together = stabilize(State.initial(car + sweep), source).final.config
    swept = stabilize(State(sweep, trajectory[-1].odometer), source).final.config
    return {
        "events": events,
        "N": rounds,
        "good": all(events) and rounds <= m - 1,
        "together": together,
        "swept": swept,
    }


def check_street_sweeper(
    sweep: Configuration,
    car: Configuration,
    m: int,
    source: InstructionSource,
    reps: int,
    sigmas: float = 3.0,
) -> tuple:
    """
    Rebuild the street-sweeper coupling over ``reps`` replicates.

    Asserts bit-exact equality of the two stabilized configurations whenever
    the good event fires, and that the empirical TV between the law of
    Stab(σ_car + σ_sweep) and the law of Stab(σ_sweep) stays below
    m·p̂ + P̂(N >= m) plus ``sigmas`` standard errors.

    Returns:
        (CheckResult, SweeperLog)
    """
    _require_recorded(source)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if car.has_sleeping() or sweep.has_sleeping():
        raise DomainError("Sweeper and car configurations must be active")

    log = SweeperLog(replicates=reps, m=m, event_failures=[0] * m)
    together, swept = [], []
    for r in range(reps):
        outcome = street_sweeper_replicate(sweep, car, m, source.derive("replica", r))
        together.append(outcome["together"].key())
        swept.append(outcome["swept"].key())
        log.n_values.append(outcome["N"])
        log.sweep_misses += not outcome["events"][0]
        log.long_car_runs += outcome["N"] >= m
        for k, event in enumerate(outcome["events"]):
            log.event_failures[k] += not event
        if outcome["good"]:
            log.good += 1
            if outcome["together"] == outcome["swept"]:
                log.coupled_equal += 1
            else:
                log.violations += 1
                if log.first_violation is None:
                    log.first_violation = r

    p, q = log.p_hat, log.q_hat
    log.tv = empirical_tv(together, swept)
    log.bound = m * p + q
    log.slack = sigmas * math.sqrt((m * m * p * (1 - p) + q * (1 - q)) / reps)

    if log.violations:
        return _failed(
            f"Coupling broken on {log.violations} good events", **log.as_dict()
        ), log
    if log.tv > log.bound + log.slack:
        return _failed(
            f"Empirical TV {log.tv:.4f} exceeds m·p̂ + P̂(N≥m) = {log.bound:.4f} (+{log.slack:.4f})",
            **log.as_dict(),
        ), log
    return _passed(**log.as_dict()), log


# ──────────────────────────────────────────────────────────────────────────────
# Stationary law
# ──────────────────────────────────────────────────────────────────────────────

def _check_small(source: InstructionSource) -> None:
    if source.topology.n > MAX_LAW_SITES:
        raise StateSpaceTooLargeError(
            f"Law comparisons are limited to n <= {MAX_LAW_SITES}"
        )


def check_exact_sampling(
    source: InstructionSource,
    extra: Configuration,
    reps: int,
    tolerance: float = 0.02,
) -> CheckResult:
    """Stab(1_V + extra) and Stab(1_V) have the same law (TV <= tolerance)."""
    _check_small(source)
    if extra.has_sleeping():
        raise DomainError("Extra particles must be active")
    with_extra = [
        sample_stationary(source.derive("extra", r), extra).sleeping_mask() for r in range(reps)
    ]
    plain = [
        sample_stationary(source.derive("stationary", r)).sleeping_mask() for r in range(reps)
    ]
    tv = empirical_tv(with_extra, plain)
    details = {"tv": tv, "tolerance": tolerance, "reps": reps, "extra": extra.to_json()}
    if tv > tolerance:
        return _failed(f"TV {tv:.4f} > {tolerance}", **details)
    return _passed(**details)


def check_stationary_invariance(
    source: InstructionSource,
    driving: DrivingSequence,
    reps: int,
    tolerance: float = 0.02,
) -> CheckResult:
    """One chain step from an exact stationary sample leaves the law unchanged."""
    _check_small(source)
    stepped, fresh = [], []
    for r in range(reps):
        start = sample_stationary(source.derive("stationary", r))
        run = run_chain(start, 1, driving.derive("driving", r), source.derive("replica", r))
        stepped.append(run.final.sleeping_mask())
        fresh.append(sample_stationary(source.derive("fresh", r)).sleeping_mask())
    tv = empirical_tv(stepped, fresh)
    details = {"tv": tv, "tolerance": tolerance, "reps": reps, "driving": repr(driving)}
    if tv > tolerance:
        return _failed(f"TV {tv:.4f} > {tolerance}", **details)
    return _passed(**details)


def check_driving_independence(
    source: InstructionSource,
    steps: int,
    reps: int,
    tolerance: float = 0.05,
    seed: int = 0,
) -> CheckResult:
    """Chains from empty under uniform and central driving end in the same law."""
    _check_small(source)
    empty = Configuration.empty(source.topology.n)
    uniform = DrivingSequence.uniform(seed)
    central = DrivingSequence.central()
    by_uniform, by_central = [], []
    for r in range(reps):
        by_uniform.append(
            run_chain(empty, steps, uniform.derive("driving", r), source.derive("uniform", r))
            .final.sleeping_mask()
        )
        by_central.append(
            run_chain(empty, steps, central, source.derive("central", r)).final.sleeping_mask()
        )
    tv = empirical_tv(by_uniform, by_central)
    details = {"tv": tv, "tolerance": tolerance, "reps": reps, "steps": steps}
    if tv > tolerance:
        return _failed(f"TV {tv:.4f} > {tolerance}", **details)
    return _passed(**details)
