"""
Enumerable oracle instances.

Instance i of a run is a pure function of (seed, i): a topology on at most six
sites (interval, or a complete graph with random kernel and self-loops), at
most six particles with some lone particles asleep, running-odometer offsets
of at most four, a region U and a recorded instruction source.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterator, Optional, Tuple

import numpy as np

from ..core.configuration import SLEEPING, Configuration, Odometer
from ..core.engine import State
from ..core.instructions import InstructionSource, SourceMode
from ..core.topology import Topology, build_general, build_interval
from ..utils.seeds import derive_seed, generator


SLEEP_RATES = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class OracleInstance:
    index: int
    source: InstructionSource
    state: State
    region: Tuple

    @property
    def topology(self) -> Topology:
        return self.source.topology

    def describe(self) -> Dict[str, Any]:
        """JSON-ready summary used in verdicts."""
        return {
            "index": self.index,
            "topology": self.topology.name,
            "n": self.topology.n,
            "lambda": self.source.sleep_rate,
            "seed": self.source.seed,
            "config": self.state.config.to_json(),
            "odometer": self.state.odometer.to_json(),
            "region": list(self.region),
        }


def _random_topology(rng: np.random.Generator, n: int) -> Topology:
    if rng.random() < 0.5:
        return build_interval(n)
    # Complete graph plus sink; every entry positive, so accessibility holds.
    kernel = rng.dirichlet(np.ones(n + 1), size=n)
    return build_general([f"v{i}" for i in range(n)], kernel)


def make_instance(
    seed: int,
    index: int,
    max_sites: int = 6,
    max_particles: int = 6,
    max_offset: int = 4,
    sleep_rate: Optional[float] = None,
) -> OracleInstance:
    rng = generator(seed, "instance", index)
    n = int(rng.integers(1, max_sites + 1))
    topology = _random_topology(rng, n)
    rate = float(sleep_rate if sleep_rate is not None else rng.choice(SLEEP_RATES))

    particles = int(rng.integers(0, max_particles + 1))
    counts = np.bincount(rng.integers(0, n, size=particles), minlength=n)
    values = [
        SLEEPING if c == 1 and rng.random() < 0.5 else int(c) for c in counts
    ]
    odometer = rng.integers(0, max_offset + 1, size=n)

    if rng.random() < 0.5:
        region = tuple(topology.vertices)
    else:
        mask = rng.random(n) < 0.6
        mask[int(rng.integers(0, n))] = True
        region = tuple(v for v, keep in zip(topology.vertices, mask) if keep)

    source = InstructionSource(
        topology, rate, derive_seed(seed, "instance", index, "stacks"), SourceMode.RECORDED
    )
    return OracleInstance(
        index=index,
        source=source,
        state=State(Configuration(values), Odometer(odometer.tolist())),
        region=region,
    )


def generate_instances(
    seed: int,
    count: int,
    max_sites: int = 6,
    max_particles: int = 6,
    max_offset: int = 4,
    sleep_rate: Optional[float] = None,
) -> Iterator[OracleInstance]:
    for index in range(count):
        yield make_instance(seed, index, max_sites, max_particles, max_offset, sleep_rate)
