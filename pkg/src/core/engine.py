"""
Sitewise ARW engine.

Operators on states (σ, f):

- ``topple``    T_v: execute Instr_v(f(v)+1) at a site holding a particle
- ``activate``  A_U: wake every sleeping particle in U
- ``jump_site`` J_v: acceptable topplings at v through the first jump
- ``jump_all``  J:   jump every particle of the configuration once
- ``jump_config`` J_σ: jump the particles of σ (a sub-configuration) once
- ``stabilize`` Stab_U: legal topplings in U until stable on U

Toppling conventions: a sleep instruction puts a lone particle to sleep and is
consumed without effect when two or more particles share the site; a particle
landing on a sleeping one wakes it; a particle jumping into the sink is
removed and counted on the boundary side it crossed.

``stabilize`` drains one site completely before moving to the next site in a
FIFO queue of unstable sites. The result does not depend on this schedule
(abelian property); the oracle package checks that on enumerable instances.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Mapping, Optional

from .configuration import SLEEPING, Configuration, Odometer
from .errors import (
    DomainError,
    IllegalJumpError,
    IllegalToppleError,
    NonTerminationError,
    SinkToppleError,
)
from .instructions import SLEEP_CODE, InstructionSource
from .topology import SINK_INDEX, BoundarySide, Topology


DEFAULT_TOPPLE_CAP = 10**9
DEFAULT_ROUND_CAP = 10**7


class Legality(str, Enum):
    LEGAL = "legal"
    ACCEPTABLE = "acceptable"


@dataclass(frozen=True)
class State:
    """ARW state (σ, f): configuration plus running odometer."""
    config: Configuration
    odometer: Odometer

    def __post_init__(self):
        if self.config.n != self.odometer.n:
            raise DomainError(
                f"Configuration has {self.config.n} sites but odometer has {self.odometer.n}"
            )

    @classmethod
    def initial(cls, config: Configuration) -> "State":
        """(σ, 0)."""
        return cls(config, Odometer.zeros(config.n))

    @property
    def n(self) -> int:
        return self.config.n

    def key(self) -> tuple:
        return (self.config.key(), self.odometer.key())


@dataclass(frozen=True)
class StabilizeReport:
    """Outcome of one stabilization."""
    initial: State
    final: State
    delta_odometer: Odometer
    visited: frozenset
    exits: Mapping[BoundarySide, int] = field(default_factory=dict)
    topple_count: int = 0

    @property
    def total_exits(self) -> int:
        return sum(self.exits.values())

    def exits_on(self, side: BoundarySide) -> int:
        return self.exits.get(BoundarySide(side), 0)


# ──────────────────────────────────────────────────────────────────────────────
# In-place kernels (lists of ints; no per-topple allocation)
# ──────────────────────────────────────────────────────────────────────────────

def apply_instruction(
    vals: list[int],
    v: int,
    code: int,
    topology: Topology,
    exits: dict,
) -> None:
    """Apply one instruction at v (the site must hold a particle)."""
    k = vals[v]
    if k == SLEEPING:
        k = 1
    if code == SLEEP_CODE:
        vals[v] = SLEEPING if k == 1 else k
        return
    vals[v] = k - 1
    w = topology.targets[v][code]
    if w == SINK_INDEX:
        side = topology.target_sides[v][code]
        exits[side] = exits.get(side, 0) + 1
    else:
        x = vals[w]
        vals[w] = 2 if x == SLEEPING else x + 1


def _stabilize_inplace(
    vals: list[int],
    odo: list[int],
    allowed: list[bool],
    source: InstructionSource,
    cap: int,
    exits: dict,
) -> int:
    """Legal topplings on ``allowed`` sites until none is active; returns count."""
    topology = source.topology
    targets = topology.targets
    sides = topology.target_sides
    block_size = source.block_size
    fetch = source.block
    n = len(vals)

    queued = [False] * n
    queue: deque = deque()
    for v in range(n):
        if allowed[v] and vals[v] >= 1:
            queue.append(v)
            queued[v] = True

    topples = 0
    while queue:
        v = queue.popleft()
        queued[v] = False
        k = vals[v]
        if k < 1:
            continue

        j = odo[v]
        row = targets[v]
        row_sides = sides[v]
        b, offset = divmod(j, block_size)
        codes = fetch(v, b)

        while k >= 1:
            if offset == block_size:
                b += 1
                offset = 0
                codes = fetch(v, b)
            code = codes[offset]
            offset += 1
            j += 1
            topples += 1
            if topples > cap:
                vals[v], odo[v] = k, j
                raise NonTerminationError(
                    f"Stabilization exceeded {cap} topplings"
                )

            if code == SLEEP_CODE:
                if k == 1:
                    k = SLEEPING
                continue

            k -= 1
            w = row[code]
            if w == SINK_INDEX:
                side = row_sides[code]
                exits[side] = exits.get(side, 0) + 1
            elif w == v:
                k += 1
            else:
                x = vals[w]
                vals[w] = 2 if x == SLEEPING else x + 1
                if allowed[w] and not queued[w]:
                    queue.append(w)
                    queued[w] = True

        vals[v] = k
        odo[v] = j

    return topples


def _jump_site_inplace(
    vals: list[int],
    odo: list[int],
    v: int,
    source: InstructionSource,
    exits: dict,
) -> None:
    topology = source.topology
    while True:
        if vals[v] == 0:
            raise IllegalJumpError(f"No particle at {topology.label(v)!r} to jump")
        odo[v] += 1
        code = source.code(v, odo[v])
        apply_instruction(vals, v, code, topology, exits)
        if code != SLEEP_CODE:
            return


def _jump_all_inplace(
    vals: list[int],
    odo: list[int],
    source: InstructionSource,
    exits: dict,
    pattern: Optional[list[int]] = None,
) -> None:
    """Jump |pattern(v)| particles at every v of supp(pattern) (default: vals)."""
    pattern = vals if pattern is None else pattern
    support = [(v, 1 if x == SLEEPING else x) for v, x in enumerate(pattern) if x != 0]
    for v, count in support:
        for _ in range(count):
            _jump_site_inplace(vals, odo, v, source, exits)


def _empty_exits(topology: Topology) -> dict:
    return {side: 0 for side in topology.sides}


def _check_state(state: State, source: InstructionSource) -> Topology:
    topology = source.topology
    if state.n != topology.n:
        raise DomainError(
            f"State has {state.n} sites but the topology has {topology.n}"
        )
    return topology


def _vertex(topology: Topology, site: Hashable) -> int:
    if topology.is_sink(site):
        raise SinkToppleError("The sink is never toppled")
    return topology.index_of(site)


# ──────────────────────────────────────────────────────────────────────────────
# Operators
# ──────────────────────────────────────────────────────────────────────────────

def topple(
    state: State,
    site: Hashable,
    source: InstructionSource,
) -> tuple[State, Legality]:
    """T_v: execute the next instruction at ``site``."""
    topology = _check_state(state, source)
    v = _vertex(topology, site)
    current = state.config[v]
    if current == 0:
        raise IllegalToppleError(f"Site {site!r} is empty")

    legality = Legality.LEGAL if current >= 1 else Legality.ACCEPTABLE
    vals = state.config.to_list()
    odo = state.odometer.to_list()
    odo[v] += 1
    apply_instruction(vals, v, source.code(v, odo[v]), topology, {})
    return State(Configuration(vals), Odometer(odo)), legality


def activate(state: State, sites: Iterable[Hashable], topology: Topology) -> State:
    """A_U: every sleeping particle in U becomes active; odometer unchanged."""
    return State(state.config.activate(topology.indices_of(sites)), state.odometer)


def jump_site(state: State, site: Hashable, source: InstructionSource) -> State:
    """J_v: acceptable topplings at ``site`` through its first jump instruction."""
    topology = _check_state(state, source)
    v = _vertex(topology, site)
    if state.config[v] == 0:
        raise IllegalJumpError(f"No particle at {site!r} to jump")
    vals = state.config.to_list()
    odo = state.odometer.to_list()
    _jump_site_inplace(vals, odo, v, source, {})
    return State(Configuration(vals), Odometer(odo))


def jump_all(state: State, source: InstructionSource) -> State:
    """J: jump |σ(v)| particles at every v of the original support."""
    _check_state(state, source)
    vals = state.config.to_list()
    odo = state.odometer.to_list()
    _jump_all_inplace(vals, odo, source, {})
    return State(Configuration(vals), Odometer(odo))


def jump_config(state: State, config: Configuration, source: InstructionSource) -> State:
    """J_σ: jump |σ(v)| particles at every v of supp σ (σ need not be the state's configuration)."""
    _check_state(state, source)
    if config.n != state.n:
        raise DomainError(f"Jump pattern has {config.n} sites, state has {state.n}")
    vals = state.config.to_list()
    odo = state.odometer.to_list()
    _jump_all_inplace(vals, odo, source, {}, config.to_list())
    return State(Configuration(vals), Odometer(odo))


def stabilize(
    state: State,
    source: InstructionSource,
    sites: Optional[Iterable[Hashable]] = None,
    cap: int = DEFAULT_TOPPLE_CAP,
) -> StabilizeReport:
    """
    Stab_U: legally topple sites of U until the configuration is stable on U.

    Args:
        state: Starting state (σ, f).
        source: Instruction stacks.
        sites: Site ids of U; all of V when omitted.
        cap: Maximum number of topplings before NonTerminationError.
    """
    if cap < 1:
        raise ValueError(f"Toppling cap must be >= 1, got {cap}")
    topology = _check_state(state, source)
    allowed = [True] * topology.n
    if sites is not None:
        allowed = [False] * topology.n
        for v in topology.indices_of(sites):
            allowed[v] = True
    return _stabilize_mask(state, source, allowed, cap)


def _stabilize_mask(
    state: State,
    source: InstructionSource,
    allowed: list[bool],
    cap: int = DEFAULT_TOPPLE_CAP,
) -> StabilizeReport:
    topology = source.topology
    vals = state.config.to_list()
    odo = state.odometer.to_list()
    exits = _empty_exits(topology)
    topples = _stabilize_inplace(vals, odo, allowed, source, cap, exits)

    final_odometer = Odometer(odo)
    delta = final_odometer - state.odometer
    visited = frozenset(
        topology.label(v) for v, d in enumerate(delta.values) if d >= 1
    )
    return StabilizeReport(
        initial=state,
        final=State(Configuration(vals), final_odometer),
        delta_odometer=delta,
        visited=visited,
        exits=exits,
        topple_count=topples,
    )


def stabilize_on_complement(
    state: State,
    site: Hashable,
    source: InstructionSource,
    cap: int = DEFAULT_TOPPLE_CAP,
) -> StabilizeReport:
    """Stab_{{v}ᶜ}: stabilize everywhere except ``site``."""
    topology = _check_state(state, source)
    v = topology.index_of(site)
    allowed = [True] * topology.n
    allowed[v] = False
    return _stabilize_mask(state, source, allowed, cap)


def visits(
    state: State,
    site: Hashable,
    source: InstructionSource,
    cap: int = DEFAULT_TOPPLE_CAP,
) -> bool:
    """True iff stabilizing on {v}ᶜ leaves an active particle at v."""
    report = stabilize_on_complement(state, site, source, cap)
    return report.final.config[source.topology.index_of(site)] >= 1


def visits_all(
    state: State,
    source: InstructionSource,
    cap: int = DEFAULT_TOPPLE_CAP,
) -> tuple[bool, Optional[Hashable]]:
    """Whether every site is toppled during stabilization, plus the first that is not."""
    report = stabilize(state, source, cap=cap)
    for site in source.topology.vertices:
        if site not in report.visited:
            return False, site
    return True, None


def is_preemptive(
    state: State,
    site: Hashable,
    source: InstructionSource,
    cap: int = DEFAULT_TOPPLE_CAP,
) -> bool:
    """T_v is preemptive: acceptable (a particle is present) and v is visited."""
    v = source.topology.index_of(site)
    return state.config[v] != 0 and visits(state, site, source, cap)


def jump_trajectory(
    config: Configuration,
    source: InstructionSource,
    rounds: int,
) -> list[State]:
    """States J^k(σ, 0) for k = 0..rounds."""
    vals = config.to_list()
    odo = [0] * config.n
    states = [State.initial(config)]
    exits: dict = {}
    for _ in range(rounds):
        _jump_all_inplace(vals, odo, source, exits)
        states.append(State(Configuration(vals), Odometer(odo)))
    return states


def jump_rounds_to_empty(
    config: Configuration,
    source: InstructionSource,
    cap: int = DEFAULT_ROUND_CAP,
) -> int:
    """Least N such that J^N(σ, 0) has the empty configuration."""
    if config.has_sleeping():
        raise DomainError("Jump rounds are defined for configurations of active particles")
    _check_state(State.initial(config), source)
    vals = config.to_list()
    odo = [0] * config.n
    exits: dict = {}
    rounds = 0
    while any(vals):
        if rounds >= cap:
            raise NonTerminationError(f"Configuration not empty after {cap} jump rounds")
        _jump_all_inplace(vals, odo, source, exits)
        rounds += 1
    return rounds
