"""
Laws of initial configurations for the visit and exit experiments.

- Central(k):  k active particles at the center
- Uniform(k):  k active particles at i.i.d. uniform sites (the first k
               sites of a uniform driving sequence)
- Fixed(σ):    a given configuration
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..chain.driving import DrivingKind, DrivingSequence
from ..core.configuration import Configuration
from ..core.topology import Topology


class LawKind(str, Enum):
    CENTRAL = "central"
    UNIFORM = "uniform"
    FIXED = "fixed"


@dataclass(frozen=True)
class ConfigurationLaw:
    kind: LawKind
    particles: int = 0
    seed: int = 0
    config: Optional[Configuration] = None

    def __post_init__(self):
        if self.particles < 0:
            raise ValueError(f"Particle count must be >= 0, got {self.particles}")
        if self.kind is LawKind.FIXED and self.config is None:
            raise ValueError("A fixed law needs a configuration")

    @classmethod
    def central(cls, particles: int) -> "ConfigurationLaw":
        return cls(LawKind.CENTRAL, particles)

    @classmethod
    def uniform(cls, particles: int, seed: int = 0) -> "ConfigurationLaw":
        return cls(LawKind.UNIFORM, particles, seed)

    @classmethod
    def fixed(cls, config: Configuration) -> "ConfigurationLaw":
        return cls(LawKind.FIXED, config.total(), config=config)

    @classmethod
    def driven(cls, driving: DrivingSequence, t: int, topology: Topology) -> "ConfigurationLaw":
        """σ_drive_t: the first t driven particles, all active, on an empty background."""
        if driving.kind is DrivingKind.CENTRAL:
            return cls.central(t)
        if driving.kind is DrivingKind.UNIFORM:
            return cls.uniform(t, driving.seed)
        return cls.fixed(_stack(driving.sites_up_to(t, topology), topology))

    def sample(self, topology: Topology, replica: int = 0) -> Configuration:
        """Configuration for one replicate (deterministic in ``replica``)."""
        if self.kind is LawKind.FIXED:
            return self.config
        if self.kind is LawKind.CENTRAL:
            if self.particles == 0:
                return Configuration.empty(topology.n)
            return Configuration.point(
                topology.n, topology.index_of(topology.center()), self.particles
            )
        driving = DrivingSequence.uniform(self.seed).derive("driving", replica)
        return _stack(driving.sites_up_to(self.particles, topology), topology)


def _stack(sites, topology: Topology) -> Configuration:
    counts = np.bincount(
        np.asarray(topology.indices_of(sites), dtype=np.int64), minlength=topology.n
    )
    return Configuration.from_counts(counts)
