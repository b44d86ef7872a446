"""
Brute-force and coupling verifiers on enumerable instances.
"""

from .checks import (
    SweeperLog,
    check_driving_independence,
    check_engine_agreement,
    check_exact_sampling,
    check_least_action,
    check_preemptive_abelian,
    check_preemptive_jump,
    check_stationary_invariance,
    check_street_sweeper,
    street_sweeper_replicate,
)
from .enumerate import enumerate_legal_stabilizations, enumerate_stabilizations
from .instances import OracleInstance, generate_instances, make_instance
from .suites import SUITE_DEFAULTS, run_suite
from .verdict import CheckResult, Outcome, Verdict

__all__ = [
    "SweeperLog",
    "check_driving_independence",
    "check_engine_agreement",
    "check_exact_sampling",
    "check_least_action",
    "check_preemptive_abelian",
    "check_preemptive_jump",
    "check_stationary_invariance",
    "check_street_sweeper",
    "street_sweeper_replicate",
    "enumerate_legal_stabilizations",
    "enumerate_stabilizations",
    "OracleInstance",
    "generate_instances",
    "make_instance",
    "SUITE_DEFAULTS",
    "run_suite",
    "CheckResult",
    "Outcome",
    "Verdict",
]
