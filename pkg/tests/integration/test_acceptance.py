"""
Acceptance-scale runs.

These take minutes to an hour and are deselected by default; run them with
``pytest -m slow``. Sizes mirror the presets in config/experiments/.
"""

import math

import numpy as np
import polars as pl
import pytest

from src.chain.driving import DrivingSequence
from src.chain.sampler import stationary_density
from src.core.instructions import InstructionSource
from src.core.topology import BoundarySide, build_interval
from src.core.walkers import simulate_hitting_time
from src.estimators.bounds import visit_failure_prob
from src.estimators.cutoff import locate_cutoff
from src.estimators.exits import exit_probability
from src.estimators.hitting import hitting_tail
from src.estimators.laws import ConfigurationLaw
from src.estimators.sweep import mixing_sweep, visit_failure_decay
from src.oracle.suites import run_suite


pytestmark = pytest.mark.slow


class TestOracleSuites:
    """Full-size oracle suites must pass without a single failure."""

    @pytest.mark.parametrize("suite", [
        "abelian",
        "preemptive-abelian",
        "least-action",
        "preemptive-jump",
        "street-sweeper",
        "exact-sampling",
        "invariance",
    ])
    def test_suite(self, suite, lab_config):
        verdict = run_suite(suite, seed=2024, threads=4, lab=lab_config)
        assert verdict.ok, verdict.first_failure

    def test_preemptive_abelian_hits_both_branches(self, lab_config):
        verdict = run_suite("preemptive-abelian", seed=2024, threads=4, lab=lab_config)
        assert set(verdict.details["branches"]) == {"equal", "strict"}


class TestHittingTail:
    """Exact tail against 10⁶ simulated walker systems."""

    @pytest.mark.parametrize("n", [1, 2, 4, 8])
    def test_matches_simulation(self, n):
        reps = 10**6
        exact = hitting_tail(n, 50).tail
        hits = simulate_hitting_time(build_interval(n), reps, np.random.default_rng(n))
        empirical = np.array([(hits >= m).mean() for m in range(51)])
        sigma = np.sqrt(exact * (1 - exact) / reps)
        assert np.all(np.abs(empirical - exact) <= 3 * sigma + 1e-9)

    def test_hand_values(self):
        assert hitting_tail(1, 2)[2] == 0.0
        assert hitting_tail(2, 2)[2] == pytest.approx(0.75)


class TestSandwich:
    """Counting lower ≤ plug-in ≤ street-sweeper upper at n = 8."""

    def test_bounds_bracket_plugin(self):
        source = InstructionSource(build_interval(8), 1.0, seed=5)
        frame = mixing_sweep(
            source, [4, 8, 16, 24, 32], DrivingSequence.central(), 20_000,
            plugin=True, threads=4,
        )
        for row in frame.iter_rows(named=True):
            assert row["lower"] <= row["plugin_hi"], row
            assert row["plugin_lo"] <= row["upper"], row


class TestCutoff:
    """Both crossings approach ρ̂·n and the window shrinks."""

    def test_cutoff_scaling(self):
        report = locate_cutoff(
            [32, 64, 128, 256], 1.0, 0.25, reps=2000, seed=11,
            density_reps=20_000, conservative=False, threads=8,
        )
        assert report.window_shrinking, report.frame
        assert report.densities[256].half_width <= 0.01
        largest = report.scaling().filter(pl.col("n") == 256).row(0, named=True)
        assert largest["t_lo_rel_err"] <= 0.10
        assert largest["t_hi_rel_err"] <= 0.10


class TestExits:
    """Excess density at the center sends particles out of the right end."""

    def test_right_exit_and_uniform_visits(self):
        n = 200
        source = InstructionSource(build_interval(n), 1.0, seed=3)
        rho_hat = stationary_density(source, 5000, threads=8).mean
        particles = math.ceil((rho_hat + 0.1) * n)

        right = exit_probability(
            ConfigurationLaw.central(particles), BoundarySide.RIGHT, source, 500,
            rho_hat=rho_hat, epsilon=0.1, threads=8,
        )
        assert right.frequency >= 0.95

        visit = visit_failure_prob(ConfigurationLaw.uniform(particles, seed=3), source, 500, threads=8)
        assert 1.0 - visit.p_hat >= 0.95


class TestDecay:
    """Visit failures decay with n at fixed excess density."""

    def test_decreasing(self):
        report = visit_failure_decay([32, 64, 128], 1.0, 0.2, reps=5000, seed=9, threads=8)
        p_hat = report.frame["p_hat"].to_list()
        assert all(b <= a for a, b in zip(p_hat, p_hat[1:]))
        if not math.isnan(report.slope):
            assert report.slope < 0
