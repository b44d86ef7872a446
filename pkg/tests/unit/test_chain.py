"""
Unit tests for driving sequences, the driven chain and stationary sampling.
"""

import json
import pickle

import numpy as np
import pytest

from src.chain.chain import ChainRun, chain_step, run_chain, sample_chain_endpoint
from src.chain.driving import DrivingKind, DrivingSequence
from src.chain.sampler import (
    sample_stationary,
    stationary_counts,
    stationary_density,
    stationary_samples,
)
from src.core.configuration import Configuration
from src.core.errors import DomainError, InvalidDrivingError
from src.core.instructions import SLEEP_CODE as S, InstructionSource
from src.core.topology import build_interval


class TestDrivingSequence:
    """Tests for central, uniform and explicit driving."""

    def test_central(self, interval8):
        driving = DrivingSequence.central()
        assert driving.sites_up_to(3, interval8) == [4, 4, 4]

    def test_central_on_general_topology(self, triangle):
        assert DrivingSequence.central().site(1, triangle) == "b"

    def test_uniform_is_pure_function_of_seed(self, interval8):
        a = DrivingSequence.uniform(17)
        b = DrivingSequence.uniform(17)
        assert a.site(500, interval8) == b.site(500, interval8)
        assert a.sites_up_to(50, interval8) == b.sites_up_to(50, interval8)

    def test_uniform_covers_vertices_evenly(self):
        topology = build_interval(4)
        sites = DrivingSequence.uniform(3).sites_up_to(8000, topology)
        counts = np.bincount(sites, minlength=5)[1:]
        assert set(sites) == {1, 2, 3, 4}
        assert np.all(np.abs(counts / 8000 - 0.25) < 0.03)

    def test_explicit(self, interval3):
        driving = DrivingSequence.explicit([1, 3])
        assert driving.sites_up_to(2, interval3) == [1, 3]
        with pytest.raises(InvalidDrivingError):
            driving.site(3, interval3)

    def test_explicit_needs_sites(self):
        with pytest.raises(InvalidDrivingError):
            DrivingSequence.explicit([])

    def test_steps_start_at_one(self, interval3):
        with pytest.raises(InvalidDrivingError):
            DrivingSequence.central().site(0, interval3)

    def test_parse(self):
        assert DrivingSequence.parse("central").kind is DrivingKind.CENTRAL
        assert DrivingSequence.parse("uniform", seed=4).seed == 4
        assert DrivingSequence.parse("Uniform:9").seed == 9
        with pytest.raises(InvalidDrivingError):
            DrivingSequence.parse("zigzag")

    def test_derive(self):
        central = DrivingSequence.central()
        assert central.derive("driving", 1) is central
        uniform = DrivingSequence.uniform(5)
        child = uniform.derive("driving", 1)
        assert child.kind is DrivingKind.UNIFORM
        assert child.seed != uniform.seed
        assert child == uniform.derive("driving", 1)

    def test_pickle(self, interval8):
        driving = DrivingSequence.uniform(5)
        first = driving.site(3, interval8)
        clone = pickle.loads(pickle.dumps(driving))
        assert clone == driving
        assert clone.site(3, interval8) == first


class TestChainStep:
    """Tests for one step of the driven-dissipative chain."""

    def test_add_and_stabilize(self, scripted):
        topology = build_interval(1)
        config, report = chain_step(Configuration.empty(1), 1, scripted(topology, {1: [S]}))
        assert config.to_json() == ["s"]
        assert report.total_exits == 0

    def test_driving_into_sink(self, source3):
        with pytest.raises(InvalidDrivingError):
            chain_step(Configuration.empty(3), 0, source3)

    def test_unknown_site(self, source3):
        with pytest.raises(InvalidDrivingError):
            chain_step(Configuration.empty(3), 9, source3)

    def test_unstable_input(self, source3):
        with pytest.raises(DomainError):
            chain_step(Configuration.from_json([1, 0, 0]), 2, source3)


class TestRunChain:
    """Tests for whole trajectories."""

    def test_hand_traced_trajectory(self, scripted):
        topology = build_interval(1)
        run = run_chain(Configuration.empty(1), 3, DrivingSequence.central(), scripted(topology, {1: [S]}))
        assert run.steps == 3
        assert run.counts == [0, 1, 0, 1]
        assert run.exits_right == [0, 0, 2, 0]
        assert run.exits_left == [0, 0, 0, 0]
        assert run.exits_total == [0, 0, 2, 0]

    def test_unstable_start_is_stabilized(self, scripted):
        topology = build_interval(1)
        run = run_chain(Configuration.from_counts([2]), 0, DrivingSequence.central(), scripted(topology, {1: [S]}))
        assert run.counts == [0]
        assert run.exits_right == [2]

    def test_counts_bounded(self, source8):
        run = run_chain(Configuration.empty(8), 40, DrivingSequence.uniform(2), source8)
        for t, count in enumerate(run.counts):
            assert count <= min(t, 8)
        assert all(config.is_stable() for config in run.states)

    def test_deterministic(self, source8):
        a = run_chain(Configuration.empty(8), 20, DrivingSequence.central(), source8)
        b = run_chain(
            Configuration.empty(8), 20, DrivingSequence.central(),
            InstructionSource(source8.topology, 1.0, seed=1),
        )
        assert a.states == b.states

    def test_negative_steps(self, source3):
        with pytest.raises(ValueError):
            run_chain(Configuration.empty(3), -1, DrivingSequence.central(), source3)

    def test_size_mismatch(self, source3):
        with pytest.raises(DomainError):
            run_chain(Configuration.empty(2), 1, DrivingSequence.central(), source3)

    def test_to_frame(self, source3):
        run = run_chain(Configuration.empty(3), 5, DrivingSequence.central(), source3)
        frame = run.to_frame()
        assert frame.columns == ["t", "count", "exits_left", "exits_right", "exits_total"]
        assert frame.height == 6
        assert frame["t"].to_list() == list(range(6))

    def test_to_frame_with_configs(self, source3):
        run = run_chain(Configuration.empty(3), 2, DrivingSequence.central(), source3)
        configs = run.to_frame(include_configs=True)["config"].to_list()
        assert json.loads(configs[0]) == [0, 0, 0]
        assert json.loads(configs[-1]) == run.final.to_json()

    def test_write_csv(self, source3, tmp_path):
        run = run_chain(Configuration.empty(3), 4, DrivingSequence.central(), source3)
        path = run.write_csv(tmp_path / "chain" / "run.csv")
        assert path.exists()
        assert path.read_text().splitlines()[0] == "t,count,exits_left,exits_right,exits_total"

    def test_empty_run(self):
        run = ChainRun()
        run.append(Configuration.empty(2))
        assert run.steps == 0
        assert run.exits_total == [0]


class TestSampleChainEndpoint:
    """Tests for checkpointed trajectories."""

    def test_matches_full_run(self, source8):
        driving = DrivingSequence.central()
        run = run_chain(Configuration.empty(8), 5, driving, source8)
        endpoints = sample_chain_endpoint(Configuration.empty(8), [5, 0, 3], driving, source8)
        assert sorted(endpoints) == [0, 3, 5]
        for t, config in endpoints.items():
            assert config == run.states[t]

    def test_no_checkpoints(self, source8):
        assert sample_chain_endpoint(Configuration.empty(8), [], DrivingSequence.central(), source8) == {}

    def test_negative_checkpoint(self, source8):
        with pytest.raises(ValueError):
            sample_chain_endpoint(Configuration.empty(8), [-1, 2], DrivingSequence.central(), source8)


class TestStationarySampling:
    """Tests for exact samples of π and the density estimate."""

    def test_sample_is_stable(self, source8):
        config = sample_stationary(source8)
        assert config.is_stable()
        assert config.n == 8

    def test_sample_with_extra(self, source8):
        config = sample_stationary(source8, Configuration.point(8, 2, 3))
        assert config.is_stable()

    def test_samples_shapes(self, source3):
        counts, masks = stationary_samples(source3, 50)
        assert counts.shape == (50,)
        assert len(masks) == 50
        assert all(0 <= m < 8 for m in masks)
        assert np.array_equal(stationary_counts(source3, 50), counts)

    def test_samples_reproducible(self, source3):
        a = stationary_samples(source3, 30)
        b = stationary_samples(InstructionSource(source3.topology, 1.0, seed=7), 30)
        assert np.array_equal(a[0], b[0])
        assert a[1] == b[1]

    def test_single_site_density(self):
        # π on one site: asleep iff the first instruction is a sleep
        source = InstructionSource(build_interval(1), 1.0, seed=21)
        estimate = stationary_density(source, 4000)
        assert abs(estimate.mean - 0.5) < 0.05
        assert estimate.lo <= estimate.mean <= estimate.hi
        assert estimate.half_width < 0.05

    def test_single_site_density_other_rate(self):
        source = InstructionSource(build_interval(1), 3.0, seed=22)
        assert abs(stationary_density(source, 4000).mean - 0.75) < 0.05

    def test_single_replicate_interval(self, source3):
        estimate = stationary_density(source3, 1)
        assert (estimate.lo, estimate.hi) == (0.0, 1.0)

    def test_reps_must_be_positive(self, source3):
        with pytest.raises(ValueError):
            stationary_samples(source3, 0)
