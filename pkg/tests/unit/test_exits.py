"""
Unit tests for configuration laws and boundary-exit experiments.
"""

import pytest

from src.chain.driving import DrivingSequence
from src.core.configuration import Configuration
from src.core.errors import DomainError
from src.core.instructions import InstructionSource
from src.core.topology import BoundarySide, build_interval
from src.estimators.exits import exit_probability, weighted_sum
from src.estimators.laws import ConfigurationLaw, LawKind


class TestConfigurationLaw:
    """Tests for the laws initial configurations are drawn from."""

    def test_central(self, interval8):
        config = ConfigurationLaw.central(5).sample(interval8)
        assert config.to_list() == [0, 0, 0, 5, 0, 0, 0, 0]

    def test_central_empty(self, interval8):
        assert ConfigurationLaw.central(0).sample(interval8) == Configuration.empty(8)

    def test_uniform_keeps_particle_count(self, interval8):
        law = ConfigurationLaw.uniform(12, seed=3)
        for replica in range(5):
            config = law.sample(interval8, replica)
            assert config.total() == 12
            assert not config.has_sleeping()
        assert law.sample(interval8, 2) == law.sample(interval8, 2)
        assert law.sample(interval8, 1) != law.sample(interval8, 2)

    def test_fixed(self, interval3):
        config = Configuration.from_json([1, 0, 2])
        law = ConfigurationLaw.fixed(config)
        assert law.particles == 3
        assert law.sample(interval3, 9) is config

    def test_driven(self, interval3):
        assert ConfigurationLaw.driven(DrivingSequence.central(), 4, interval3).kind is LawKind.CENTRAL
        assert ConfigurationLaw.driven(DrivingSequence.uniform(1), 4, interval3).kind is LawKind.UNIFORM
        law = ConfigurationLaw.driven(DrivingSequence.explicit([1, 3, 3]), 3, interval3)
        assert law.sample(interval3).to_list() == [1, 0, 2]

    def test_invalid(self):
        with pytest.raises(ValueError):
            ConfigurationLaw.central(-1)
        with pytest.raises(ValueError):
            ConfigurationLaw(LawKind.FIXED)


class TestWeightedSum:
    """Tests for left- and right-weighted sums."""

    def test_sides(self):
        config = Configuration.from_json([1, 0, 2])
        assert weighted_sum(config, BoundarySide.RIGHT) == 7
        assert weighted_sum(config, BoundarySide.LEFT) == 5
        assert weighted_sum(config, "right") == 7

    def test_sink_side(self):
        with pytest.raises(DomainError):
            weighted_sum(Configuration.ones(2), BoundarySide.SINK)

    def test_sleepers_rejected(self):
        with pytest.raises(DomainError):
            weighted_sum(Configuration.from_json(["s", 1]), BoundarySide.RIGHT)


class TestExitProbability:
    """Tests for the exit-probability estimator."""

    def test_two_particles_on_one_site(self):
        # only one of them can fall asleep
        source = InstructionSource(build_interval(1), 1.0, seed=8)
        law = ConfigurationLaw.central(2)
        right = exit_probability(law, BoundarySide.RIGHT, source, 4000)
        left = exit_probability(law, BoundarySide.LEFT, source, 4000)
        assert right.any_exit_frequency == 1.0
        assert 0.0 < right.frequency < 1.0
        assert abs(right.frequency - left.frequency) < 0.05
        assert right.lo <= right.frequency <= right.hi

    def test_empty_configuration(self, source3):
        estimate = exit_probability(ConfigurationLaw.central(0), BoundarySide.RIGHT, source3, 20)
        assert estimate.exits == 0
        assert estimate.frequency == 0.0
        assert estimate.weighted_mean == 0.0
        assert estimate.hypothesis_rate is None

    def test_hypothesis_rate(self):
        source = InstructionSource(build_interval(1), 1.0, seed=8)
        estimate = exit_probability(
            ConfigurationLaw.central(2), BoundarySide.RIGHT, source, 50,
            rho_hat=0.5, epsilon=0.1,
        )
        assert estimate.threshold == pytest.approx(0.3)
        assert estimate.hypothesis_rate == 1.0
        assert (estimate.weighted_min, estimate.weighted_max) == (2, 2)

    def test_fixed_law_weighted_sum(self, source8):
        config = Configuration.point(8, 7, 3)
        estimate = exit_probability(ConfigurationLaw.fixed(config), "right", source8, 10)
        assert estimate.weighted_mean == 24.0

    def test_interval_only(self, triangle):
        source = InstructionSource(triangle, 1.0, seed=1)
        with pytest.raises(DomainError):
            exit_probability(ConfigurationLaw.central(1), BoundarySide.SINK, source, 5)

    def test_reps_checked(self, source3):
        with pytest.raises(ValueError):
            exit_probability(ConfigurationLaw.central(1), BoundarySide.LEFT, source3, 0)
