"""
Core ARW engine: topologies, configurations, instruction stacks, toppling.
"""

from .configuration import SLEEPING, Configuration, Odometer, add_codes, particle_count
from .engine import (
    DEFAULT_TOPPLE_CAP,
    Legality,
    StabilizeReport,
    State,
    activate,
    is_preemptive,
    jump_all,
    jump_config,
    jump_rounds_to_empty,
    jump_site,
    jump_trajectory,
    stabilize,
    stabilize_on_complement,
    topple,
    visits,
    visits_all,
)
from .errors import ArwError
from .instructions import Instruction, InstructionKind, InstructionSource, SourceMode
from .topology import BoundarySide, Move, Topology, build_general, build_interval
from .walkers import simulate_hitting_time

__all__ = [
    "SLEEPING",
    "Configuration",
    "Odometer",
    "add_codes",
    "particle_count",
    "DEFAULT_TOPPLE_CAP",
    "Legality",
    "StabilizeReport",
    "State",
    "activate",
    "is_preemptive",
    "jump_all",
    "jump_config",
    "jump_rounds_to_empty",
    "jump_site",
    "jump_trajectory",
    "stabilize",
    "stabilize_on_complement",
    "topple",
    "visits",
    "visits_all",
    "ArwError",
    "Instruction",
    "InstructionKind",
    "InstructionSource",
    "SourceMode",
    "BoundarySide",
    "Move",
    "Topology",
    "build_general",
    "build_interval",
    "simulate_hitting_time",
]
