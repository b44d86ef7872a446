"""
The driven-dissipative chain.

At each step t >= 1 an active particle is added at u_t and the configuration
is stabilized; particles reaching the sink are killed. Every step draws on a
fresh instruction source keyed by ("step", t), so the chain is a function of
(seed, driving) alone. An unstable starting configuration is stabilized once
at step 0 with the ("step", 0) source.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Hashable, Iterable, Iterator, List, Tuple

import polars as pl
from loguru import logger

from ..core.configuration import Configuration
from ..core.engine import StabilizeReport, State, stabilize
from ..core.errors import DomainError, InvalidDrivingError
from ..core.instructions import InstructionSource
from ..core.topology import BoundarySide
from .driving import DrivingSequence


@dataclass
class ChainRun:
    """
    Trajectory σ_0, σ_1, ..., σ_t of the chain.

    ``exits_*[t]`` count the particles killed while producing σ_t (entry 0 is
    the step-0 stabilization, zero when σ_0 was already stable).
    """
    states: List[Configuration] = field(default_factory=list)
    exits_left: List[int] = field(default_factory=list)
    exits_right: List[int] = field(default_factory=list)
    exits_total: List[int] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    @property
    def counts(self) -> List[int]:
        return [config.total() for config in self.states]

    @property
    def final(self) -> Configuration:
        return self.states[-1]

    def append(self, config: Configuration, report: StabilizeReport = None) -> None:
        self.states.append(config)
        if report is None:
            self.exits_left.append(0)
            self.exits_right.append(0)
            self.exits_total.append(0)
        else:
            self.exits_left.append(report.exits_on(BoundarySide.LEFT))
            self.exits_right.append(report.exits_on(BoundarySide.RIGHT))
            self.exits_total.append(report.total_exits)

    def to_frame(self, include_configs: bool = False) -> pl.DataFrame:
        data = {
            "t": list(range(len(self.states))),
            "count": self.counts,
            "exits_left": self.exits_left,
            "exits_right": self.exits_right,
            "exits_total": self.exits_total,
        }
        if include_configs:
            data["config"] = [
                json.dumps(config.to_json(), separators=(",", ":")) for config in self.states
            ]
        return pl.DataFrame(data)

    def write_csv(self, path: Path, include_configs: bool = False) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame(include_configs).write_csv(path)
        return path


def chain_step(
    config: Configuration,
    site: Hashable,
    source: InstructionSource,
) -> Tuple[Configuration, StabilizeReport]:
    """Add an active particle at ``site`` to a stable configuration and stabilize."""
    topology = source.topology
    if topology.is_sink(site):
        raise InvalidDrivingError("Particles cannot be driven into the sink")
    if not config.is_stable():
        raise DomainError(f"chain_step expects a stable configuration, got {config!r}")
    try:
        v = topology.index_of(site)
    except DomainError as exc:
        raise InvalidDrivingError(str(exc)) from None

    driven = config + Configuration.point(topology.n, v)
    report = stabilize(State.initial(driven), source)
    return report.final.config, report


def _iterate_chain(
    initial: Configuration,
    t: int,
    driving: DrivingSequence,
    source: InstructionSource,
) -> Iterator[Tuple[int, Configuration, StabilizeReport]]:
    if t < 0:
        raise ValueError(f"Number of chain steps must be >= 0, got {t}")
    topology = source.topology
    if initial.n != topology.n:
        raise DomainError(
            f"Initial configuration has {initial.n} sites, topology has {topology.n}"
        )

    config, report = initial, None
    if not config.is_stable():
        report = stabilize(State.initial(config), source.derive("step", 0))
        config = report.final.config
    yield 0, config, report

    for step in range(1, t + 1):
        site = driving.site(step, topology)
        config, report = chain_step(config, site, source.derive("step", step))
        yield step, config, report


def run_chain(
    initial: Configuration,
    t: int,
    driving: DrivingSequence,
    source: InstructionSource,
) -> ChainRun:
    """Run t chain steps from ``initial`` and keep the whole trajectory."""
    run = ChainRun()
    for _, config, report in _iterate_chain(initial, t, driving, source):
        run.append(config, report)
    logger.debug(
        f"Chain: {t} steps, final count {run.final.total()}, "
        f"{sum(run.exits_total)} particles killed"
    )
    return run


def sample_chain_endpoint(
    initial: Configuration,
    checkpoints: Iterable[int],
    driving: DrivingSequence,
    source: InstructionSource,
) -> Dict[int, Configuration]:
    """σ_t at every checkpoint t from a single trajectory."""
    wanted = sorted(set(int(t) for t in checkpoints))
    if not wanted:
        return {}
    if wanted[0] < 0:
        raise ValueError(f"Checkpoints must be >= 0, got {wanted[0]}")

    targets = set(wanted)
    found: Dict[int, Configuration] = {}
    for step, config, _ in _iterate_chain(initial, wanted[-1], driving, source):
        if step in targets:
            found[step] = config
    return found
