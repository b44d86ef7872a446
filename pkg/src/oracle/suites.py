"""
Oracle suites.

Every suite turns a seed into a Verdict. Instance-based suites regenerate
instance i from (seed, i) inside the worker, so verdicts do not depend on the
number of worker processes.
"""

import time
from typing import Any, Dict, Optional

from loguru import logger

from ..chain.driving import DrivingSequence
from ..core.configuration import Configuration
from ..core.instructions import InstructionSource
from ..core.topology import build_interval
from ..utils.config import SUITES, LabConfig, load_suite_settings
from ..utils.parallel import run_replicas
from ..utils.seeds import derive_seed, generator
from .checks import (
    check_driving_independence,
    check_engine_agreement,
    check_exact_sampling,
    check_least_action,
    check_preemptive_abelian,
    check_preemptive_jump,
    check_stationary_invariance,
    check_street_sweeper,
)
from .instances import OracleInstance, make_instance
from .verdict import CheckResult, Outcome, Verdict


SUITE_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "abelian": {"instances": 10_000},
    "least-action": {"instances": 2_000, "trials": 5},
    "preemptive-abelian": {"instances": 10_000},
    "preemptive-jump": {"instances": 5_000},
    "street-sweeper": {"n": 3, "lambda": 1.0, "m": 8, "reps": 10_000},
    "exact-sampling": {"sizes": [1, 2, 3], "lambda": 1.0, "reps": 100_000},
    "invariance": {
        "sizes": [1, 2, 3],
        "lambda": 1.0,
        "reps": 100_000,
        "driving_n": 3,
        "steps_per_site": 10,
    },
}


# ──────────────────────────────────────────────────────────────────────────────
# Instance-based suites
# ──────────────────────────────────────────────────────────────────────────────

def _preemptive_jump_on(instance: OracleInstance) -> CheckResult:
    """Split the instance into σ (a sub-configuration) and active τ, then check."""
    rng = generator(instance.source.seed, "split")
    sigma_vals, tau_vals = [], []
    for value in instance.state.config.to_list():
        if value == 0:
            sigma_vals.append(0)
            tau_vals.append(0)
        elif value < 0 or rng.random() < 0.5:
            # sleeping particles always go to σ
            sigma_vals.append(value)
            tau_vals.append(0)
        else:
            keep = int(rng.integers(0, value + 1))
            sigma_vals.append(keep)
            tau_vals.append(value - keep)
    return check_preemptive_jump(
        Configuration(sigma_vals),
        Configuration(tau_vals),
        instance.state.odometer,
        instance.source,
    )


def _instance_task(task: tuple) -> tuple:
    suite, seed, index, params = task
    instance = make_instance(seed, index)

    if suite == "abelian":
        result = check_engine_agreement(instance, params["node_budget"])
    elif suite == "least-action":
        result = check_least_action(
            instance,
            params["trials"],
            generator(seed, "least-action", index),
            params["illegal_rate"],
            params["node_budget"],
        )
    elif suite == "preemptive-abelian":
        support = instance.state.config.support()
        if not support:
            result = CheckResult(Outcome.SKIPPED, "Empty configuration")
        else:
            rng = generator(seed, "site", index)
            site = instance.topology.label(support[int(rng.integers(len(support)))])
            result = check_preemptive_abelian(instance, site)
    elif suite == "preemptive-jump":
        result = _preemptive_jump_on(instance)
    else:
        raise ValueError(f"Unknown instance suite {suite!r}")

    return result, instance.describe()


def _run_instances(
    verdict: Verdict,
    seed: int,
    count: int,
    params: Dict[str, Any],
    threads: int,
) -> None:
    tasks = [(verdict.suite, seed, i, params) for i in range(count)]
    branches: Dict[str, int] = {}
    for result, description in run_replicas(_instance_task, tasks, threads):
        verdict.record(result, description)
        branch = result.details.get("branch")
        if branch:
            branches[branch] = branches.get(branch, 0) + 1
    if branches:
        verdict.details["branches"] = branches


# ──────────────────────────────────────────────────────────────────────────────
# Monte Carlo suites
# ──────────────────────────────────────────────────────────────────────────────

def _street_sweeper(verdict: Verdict, seed: int, params: Dict[str, Any], lab: LabConfig) -> None:
    n = int(params["n"])
    source = InstructionSource(build_interval(n), float(params["lambda"]), seed)
    ones = Configuration.ones(n)
    result, log = check_street_sweeper(
        ones, ones, int(params["m"]), source, int(params["reps"]), lab.oracle.sweeper_sigmas
    )
    verdict.instances = log.replicates
    verdict.passed = log.replicates - log.violations
    verdict.details = log.as_dict()
    if result.outcome is Outcome.FAILED:
        verdict.fail(result.message, log.as_dict())


def _exact_sampling(verdict: Verdict, seed: int, params: Dict[str, Any], lab: LabConfig) -> None:
    tvs = {}
    for n in params["sizes"]:
        topology = build_interval(int(n))
        source = InstructionSource(topology, float(params["lambda"]), derive_seed(seed, "size", n))
        center = topology.index_of(topology.center())
        extras = {
            "zero": Configuration.empty(topology.n),
            "delta_1": Configuration.point(topology.n, 0),
            "three_center": Configuration.point(topology.n, center, 3),
        }
        for name, extra in extras.items():
            result = check_exact_sampling(
                source.derive(name), extra, int(params["reps"]), lab.oracle.tolerance
            )
            verdict.record(result, {"n": n, "extra": name})
            tvs[f"n={n}/{name}"] = result.details["tv"]
    verdict.details["tv"] = tvs


def _invariance(verdict: Verdict, seed: int, params: Dict[str, Any], lab: LabConfig) -> None:
    tvs = {}
    reps = int(params["reps"])
    rate = float(params["lambda"])
    for n in params["sizes"]:
        source = InstructionSource(build_interval(int(n)), rate, derive_seed(seed, "size", n))
        for name, driving in (
            ("central", DrivingSequence.central()),
            ("uniform", DrivingSequence.uniform(derive_seed(seed, "driving", n))),
        ):
            result = check_stationary_invariance(
                source.derive(name), driving, reps, lab.oracle.tolerance
            )
            verdict.record(result, {"n": n, "driving": name})
            tvs[f"n={n}/{name}"] = result.details["tv"]

    n = int(params["driving_n"])
    source = InstructionSource(build_interval(n), rate, derive_seed(seed, "driving-independence"))
    result = check_driving_independence(
        source, int(params["steps_per_site"]) * n, reps, lab.oracle.driving_tolerance, seed
    )
    verdict.record(result, {"n": n, "check": "driving-independence"})
    tvs[f"n={n}/uniform-vs-central"] = result.details["tv"]
    verdict.details["tv"] = tvs


# ──────────────────────────────────────────────────────────────────────────────
# Entry point
# ──────────────────────────────────────────────────────────────────────────────

def suite_settings(name: str, lab: Optional[LabConfig] = None) -> Dict[str, Any]:
    """Defaults for a suite, overridden by the suites file."""
    lab = lab or LabConfig()
    settings = dict(SUITE_DEFAULTS[name])
    settings.update(load_suite_settings(lab.oracle.suites_file).get(name, {}))
    return settings


def run_suite(
    name: str,
    seed: int,
    instances: Optional[int] = None,
    reps: Optional[int] = None,
    threads: int = 1,
    lab: Optional[LabConfig] = None,
) -> Verdict:
    """
    Run one oracle suite.

    Args:
        name: One of ``SUITES``.
        seed: Master seed.
        instances: Instance count for instance-based suites.
        reps: Replicates for Monte Carlo suites.
        threads: Worker processes.
        lab: Lab configuration (node budget, tolerances, suites file).
    """
    if name not in SUITES:
        raise ValueError(f"Unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    lab = lab or LabConfig()
    settings = suite_settings(name, lab)
    if instances is not None:
        settings["instances"] = instances
    if reps is not None:
        settings["reps"] = reps

    log = logger.bind(component="OracleSuite")
    log.info("=" * 60)
    log.info(f"ORACLE: suite={name} seed={seed}")
    log.info("=" * 60)
    started = time.perf_counter()

    verdict = Verdict(suite=name)
    if name in ("abelian", "least-action", "preemptive-abelian", "preemptive-jump"):
        params = {
            "node_budget": lab.oracle.node_budget,
            "illegal_rate": lab.oracle.illegal_rate,
            "trials": int(settings.get("trials", 5)),
        }
        _run_instances(verdict, seed, int(settings["instances"]), params, threads)
    elif name == "street-sweeper":
        _street_sweeper(verdict, seed, settings, lab)
    elif name == "exact-sampling":
        _exact_sampling(verdict, seed, settings, lab)
    else:
        _invariance(verdict, seed, settings, lab)

    elapsed = time.perf_counter() - started
    verdict.details["elapsed_seconds"] = round(elapsed, 3)
    status = "✓" if verdict.ok else "✗"
    log.info(
        f"{status} {name}: {verdict.passed}/{verdict.instances} passed, "
        f"{verdict.skipped} skipped ({elapsed:.1f}s)"
    )
    return verdict
