"""
Instruction stacks Instr_v(j).

Each instruction is ``sleep`` with probability λ/(1+λ) and otherwise a jump
whose destination follows Q(v, ·). The engine works with integer codes:
``SLEEP_CODE`` or the index of the selected move in ``topology.moves[v]``.

Recorded mode computes Instr_v(j) as a pure function of (seed, v, j) through a
Philox counter stream (see ``src.utils.seeds``); nothing is stored beyond one
decoded block per site. Ephemeral mode draws blocks from a sequential PCG64
stream: faster to reason about for throughput, but not replayable.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Optional

import numpy as np

from ..utils.seeds import PathComponent, check_seed, derive_seed
from .errors import DomainError, UnsupportedIndexError
from .topology import SINK_INDEX, BoundarySide, Topology


SLEEP_CODE = -1
DEFAULT_BLOCK_SIZE = 1024


class InstructionKind(str, Enum):
    SLEEP = "sleep"
    JUMP = "jump"


class SourceMode(str, Enum):
    RECORDED = "recorded"
    EPHEMERAL = "ephemeral"


@dataclass(frozen=True)
class Instruction:
    """A decoded instruction: sleep, or jump to ``destination``."""
    kind: InstructionKind
    destination: Optional[Hashable] = None
    side: Optional[BoundarySide] = None

    @property
    def is_sleep(self) -> bool:
        return self.kind is InstructionKind.SLEEP


class InstructionSource:
    """
    Random instruction stacks on every vertex of a topology.

    Args:
        topology: Graph whose kernel gives the jump law.
        sleep_rate: λ > 0.
        seed: 64-bit seed.
        mode: RECORDED (replayable) or EPHEMERAL (streamed).
        block_size: Instructions decoded per site at a time.
    """

    def __init__(
        self,
        topology: Topology,
        sleep_rate: float,
        seed: int = 0,
        mode: SourceMode = SourceMode.RECORDED,
        block_size: int = DEFAULT_BLOCK_SIZE,
    ):
        if not (isinstance(sleep_rate, (int, float)) and math.isfinite(sleep_rate)) or sleep_rate <= 0:
            raise DomainError(f"Sleep rate must be a positive real, got {sleep_rate!r}")
        self.topology = topology
        self.sleep_rate = float(sleep_rate)
        self.seed = check_seed(seed)
        self.mode = SourceMode(mode)
        self.block_size = int(block_size)
        self.p_sleep = self.sleep_rate / (1.0 + self.sleep_rate)

        self._blocks: dict[int, tuple[int, list[int]]] = {}
        self._rng = (
            np.random.default_rng(self.seed) if self.mode is SourceMode.EPHEMERAL else None
        )

    def __repr__(self) -> str:
        return (
            f"InstructionSource(lambda={self.sleep_rate}, seed={self.seed}, "
            f"mode={self.mode.value}, topology={self.topology!r})"
        )

    def __getstate__(self) -> dict:
        state = self.__dict__.copy()
        state["_blocks"] = {}
        return state

    @property
    def is_recorded(self) -> bool:
        return self.mode is SourceMode.RECORDED

    def require_recorded(self, purpose: str) -> None:
        """Raise DomainError unless stacks can be re-read from the start."""
        if not self.is_recorded:
            raise DomainError(f"{purpose} need a recorded instruction source")

    def derive(self, *path: PathComponent) -> "InstructionSource":
        """Independent child source keyed by ``path`` (same topology, λ, mode)."""
        return InstructionSource(
            topology=self.topology,
            sleep_rate=self.sleep_rate,
            seed=derive_seed(self.seed, *path),
            mode=self.mode,
            block_size=self.block_size,
        )

    # ------------------------------------------------------------------
    # Code access (engine hot path)
    # ------------------------------------------------------------------

    def block(self, vertex: int, index: int) -> list[int]:
        """Decoded codes for j in [index*B + 1, (index+1)*B] at ``vertex``."""
        cached = self._blocks.get(vertex)
        if cached is not None and cached[0] == index:
            return cached[1]

        if self._rng is None:
            bit_generator = np.random.Philox(
                key=(self.seed << 64) | vertex, counter=int(index) << 64
            )
            uniforms = np.random.Generator(bit_generator).random(self.block_size)
        else:
            uniforms = self._rng.random(self.block_size)

        codes = self._decode(vertex, uniforms).tolist()
        self._blocks[vertex] = (index, codes)
        return codes

    def code(self, vertex: int, j: int) -> int:
        if j <= 0:
            raise UnsupportedIndexError(
                f"Instruction index must be >= 1, got {j} (extended odometers unsupported)"
            )
        b, offset = divmod(j - 1, self.block_size)
        return self.block(vertex, b)[offset]

    def _decode(self, vertex: int, uniforms: np.ndarray) -> np.ndarray:
        codes = np.full(uniforms.shape, SLEEP_CODE, dtype=np.int64)
        jump = uniforms >= self.p_sleep
        scaled = (uniforms[jump] - self.p_sleep) / (1.0 - self.p_sleep)
        cumulative = self.topology.cumulative[vertex]
        codes[jump] = np.minimum(
            np.searchsorted(cumulative, scaled, side="right"), len(cumulative) - 1
        )
        return codes

    # ------------------------------------------------------------------
    # Public lookup
    # ------------------------------------------------------------------

    def instruction(self, site: Hashable, j: int) -> Instruction:
        """Instr_v(j) for a site id ``site`` and index j >= 1."""
        if self.topology.is_sink(site):
            raise DomainError("The sink carries no instruction stack")
        vertex = self.topology.index_of(site)
        return self.describe(vertex, self.code(vertex, j))

    def describe(self, vertex: int, code: int) -> Instruction:
        if code == SLEEP_CODE:
            return Instruction(InstructionKind.SLEEP)
        move = self.topology.moves[vertex][code]
        if move.target == SINK_INDEX:
            return Instruction(InstructionKind.JUMP, self.topology.sink, move.side)
        return Instruction(InstructionKind.JUMP, self.topology.label(move.target))
