"""
Independent simultaneous walkers: direct simulation of H.

H is the first step at which walkers started one per vertex, all jumping
together under Q, have every one been absorbed by the sink.
"""

import numpy as np

from .errors import NonTerminationError
from .topology import SINK_INDEX, Topology


DEFAULT_STEP_CAP = 10**7


def simulate_hitting_time(
    topology: Topology,
    reps: int,
    rng: np.random.Generator,
    max_steps: int = DEFAULT_STEP_CAP,
) -> np.ndarray:
    """Draw ``reps`` independent copies of H (int64 array)."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")

    n = topology.n
    targets = [np.asarray(row, dtype=np.int64) for row in topology.targets]
    cumulative = topology.cumulative

    positions = np.tile(np.arange(n, dtype=np.int64), (reps, 1))
    hits = np.zeros(reps, dtype=np.int64)
    running = np.ones(reps, dtype=bool)

    step = 0
    while running.any():
        step += 1
        if step > max_steps:
            raise NonTerminationError(f"Walkers not absorbed after {max_steps} steps")
        draws = rng.random(positions.shape)
        moved = positions.copy()
        for v in range(n):
            at_v = positions == v
            if not at_v.any():
                continue
            choice = np.searchsorted(cumulative[v], draws[at_v], side="right")
            moved[at_v] = targets[v][np.minimum(choice, len(targets[v]) - 1)]
        positions = moved

        absorbed = running & np.all(positions == SINK_INDEX, axis=1)
        hits[absorbed] = step
        running &= ~absorbed

    return hits
