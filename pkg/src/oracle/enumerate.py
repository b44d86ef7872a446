"""
Exhaustive enumeration of legal stabilizations.

Depth-first search over every maximal legal toppling sequence confined to a
region U. States already expanded are memoised, so the node count is the
number of distinct reachable states.
"""

from typing import Hashable, Iterable, Optional, Set

from ..core.configuration import Configuration, Odometer
from ..core.engine import State, apply_instruction
from ..core.errors import BudgetExceededError
from ..core.instructions import InstructionSource
from .instances import OracleInstance


DEFAULT_NODE_BUDGET = 10**6


def enumerate_stabilizations(
    state: State,
    source: InstructionSource,
    sites: Optional[Iterable[Hashable]] = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Set[State]:
    """Distinct (configuration, odometer) outcomes of all maximal legal sequences in U."""
    topology = source.topology
    region = (
        list(range(topology.n)) if sites is None else sorted(topology.indices_of(sites))
    )

    outcomes: Set[State] = set()
    seen = set()
    stack = [(tuple(state.config.to_list()), tuple(state.odometer.to_list()))]

    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if len(seen) > budget:
            raise BudgetExceededError(f"Enumeration exceeded {budget} states")

        vals, odo = node
        active = [v for v in region if vals[v] >= 1]
        if not active:
            outcomes.add(State(Configuration(vals), Odometer(odo)))
            continue

        for v in active:
            next_vals, next_odo = list(vals), list(odo)
            next_odo[v] += 1
            apply_instruction(next_vals, v, source.code(v, next_odo[v]), topology, {})
            child = (tuple(next_vals), tuple(next_odo))
            if child not in seen:
                stack.append(child)

    return outcomes


def enumerate_legal_stabilizations(
    instance: OracleInstance,
    sites: Optional[Iterable[Hashable]] = None,
    budget: int = DEFAULT_NODE_BUDGET,
) -> Set[State]:
    """``enumerate_stabilizations`` on an oracle instance (region U by default)."""
    region = instance.region if sites is None else sites
    return enumerate_stabilizations(instance.state, instance.source, region, budget)
