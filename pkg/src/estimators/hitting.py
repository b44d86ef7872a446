"""
Exact tail of H, the absorption time of independent simultaneous walkers.

With a_v(m) the probability that the walker started at v has been absorbed
by step m (rows of the substochastic kernel P killed at the sink):

    P(H <= m) = ∏_v a_v(m),    tail[m] = P(H >= m) = 1 − ∏_v a_v(m − 1)

and tail[0] = 1.
"""

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
import polars as pl

from ..core.topology import Topology, build_interval


@dataclass
class HittingTail:
    """tail[m] = P(H >= m) for m = 0..M."""
    n: int
    tail: np.ndarray

    @property
    def max_m(self) -> int:
        return len(self.tail) - 1

    def __getitem__(self, m: int) -> float:
        return float(self.tail[m])

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame({"m": np.arange(len(self.tail)), "tail": self.tail})


def _topology(n_or_topology: Union[int, Topology]) -> Topology:
    if isinstance(n_or_topology, Topology):
        return n_or_topology
    return build_interval(n_or_topology)


def hitting_tail(n_or_topology: Union[int, Topology], max_m: int) -> HittingTail:
    """Tail of H up to ``max_m`` by stepping the survival matrix forward."""
    if max_m < 1:
        raise ValueError(f"max_m must be >= 1, got {max_m}")
    topology = _topology(n_or_topology)
    kernel = topology.substochastic_matrix()

    tail = np.ones(max_m + 1)
    survival = np.eye(topology.n)
    for m in range(2, max_m + 1):
        survival = survival @ kernel  # P^(m-1)
        absorbed = np.clip(1.0 - survival.sum(axis=1), 0.0, 1.0)
        tail[m] = 1.0 - float(np.prod(absorbed))

    return HittingTail(n=topology.n, tail=np.clip(tail, 0.0, 1.0))


def hitting_tail_at(n_or_topology: Union[int, Topology], ms: Iterable[int]) -> np.ndarray:
    """P(H >= m) at arbitrary (possibly huge) m through matrix powers."""
    topology = _topology(n_or_topology)
    kernel = topology.substochastic_matrix()
    ms = [int(m) for m in ms]
    out = np.ones(len(ms))

    order = sorted(range(len(ms)), key=lambda i: ms[i])
    survival = np.eye(topology.n)
    power = 0
    for i in order:
        m = ms[i]
        if m < 0:
            raise ValueError(f"m must be >= 0, got {m}")
        if m <= 1:
            continue
        survival = survival @ np.linalg.matrix_power(kernel, m - 1 - power)
        power = m - 1
        absorbed = np.clip(1.0 - survival.sum(axis=1), 0.0, 1.0)
        out[i] = 1.0 - float(np.prod(absorbed))

    return np.clip(out, 0.0, 1.0)
