"""
Topologies: a finite vertex set plus an absorbing sink and a base-chain kernel Q.

Every vertex carries a table of *moves* (target, probability, boundary side).
Jump instructions select a move, so the same table drives the engine, the
kernel matrices used by the hitting-time DP, and exit accounting. Moves into
the sink are labelled with the boundary side they cross; on the interval the
two sides are LEFT (1 -> 0) and RIGHT (n -> n+1), elsewhere SINK.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import AccessibilityError, DomainError, InvalidSizeError, KernelError


ROW_SUM_TOLERANCE = 1e-12

# Engine-internal index for the sink
SINK_INDEX = -1


class BoundarySide(str, Enum):
    """Boundary a particle crosses when it is absorbed."""
    LEFT = "left"
    RIGHT = "right"
    SINK = "sink"


@dataclass(frozen=True)
class Move:
    """One possible jump from a vertex."""
    target: int  # vertex index, or SINK_INDEX
    probability: float
    side: Optional[BoundarySide] = None


class Topology:
    """
    Finite graph V ∪ {z} with a base-chain kernel.

    Use ``build_interval`` or ``build_general`` rather than the constructor;
    they validate the kernel and the accessibility conditions.
    """

    def __init__(
        self,
        vertices: Sequence[Hashable],
        sink: Hashable,
        moves: Sequence[Sequence[Move]],
        name: str = "general",
        sink_aliases: Iterable[Hashable] = (),
    ):
        self.vertices: tuple = tuple(vertices)
        self.sink = sink
        self.moves: tuple = tuple(tuple(row) for row in moves)
        self.name = name
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self._sink_labels = frozenset({sink, *sink_aliases})

        # Flat tables for the toppling loop
        self.targets: list[list[int]] = [[m.target for m in row] for row in self.moves]
        self.target_sides: list[list[Optional[BoundarySide]]] = [
            [m.side for m in row] for row in self.moves
        ]
        self.cumulative: list[np.ndarray] = []
        for row in self.moves:
            cum = np.cumsum([m.probability for m in row])
            cum[-1] = 1.0
            self.cumulative.append(cum)

        sides = {m.side for row in self.moves for m in row if m.target == SINK_INDEX}
        self.sides: tuple[BoundarySide, ...] = tuple(
            s for s in BoundarySide if s in sides
        )

    def __repr__(self) -> str:
        return f"Topology(name={self.name!r}, n={self.n})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.sink == other.sink
            and self.moves == other.moves
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.sink, self.moves))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def is_interval(self) -> bool:
        return self.name == "interval"

    def is_sink(self, site: Hashable) -> bool:
        return site in self._sink_labels and site not in self._index

    def index_of(self, site: Hashable) -> int:
        """Position of a site id in ``vertices``."""
        try:
            return self._index[site]
        except (KeyError, TypeError):
            raise DomainError(f"{site!r} is not a vertex of {self!r}") from None

    def indices_of(self, sites: Iterable[Hashable]) -> list[int]:
        return [self.index_of(s) for s in sites]

    def label(self, index: int) -> Hashable:
        return self.sink if index == SINK_INDEX else self.vertices[index]

    def center(self) -> Hashable:
        """⌈n/2⌉ on the interval; the vertex at position ⌈n/2⌉-1 in general."""
        return self.vertices[(self.n + 1) // 2 - 1]

    def kernel_matrix(self) -> np.ndarray:
        """Q as an (n, n+1) matrix; the last column is the sink."""
        q = np.zeros((self.n, self.n + 1))
        for v, row in enumerate(self.moves):
            for m in row:
                q[v, m.target if m.target != SINK_INDEX else self.n] += m.probability
        return q

    def substochastic_matrix(self) -> np.ndarray:
        """Q restricted to V (killed at the sink)."""
        return self.kernel_matrix()[:, : self.n]

    def sink_probability(self, index: int, side: Optional[BoundarySide] = None) -> float:
        return sum(
            m.probability for m in self.moves[index]
            if m.target == SINK_INDEX and (side is None or m.side == side)
        )


# ──────────────────────────────────────────────────────────────────────────────
# Builders
# ──────────────────────────────────────────────────────────────────────────────

def build_interval(n: int) -> Topology:
    """
    Simple random walk on ⟦1,n⟧ with sink {0, n+1}.

    Sites are labelled 1..n; the sink is labelled 0 and n+1 is accepted as an
    alias. Steps off either end are absorbed and tagged LEFT or RIGHT.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidSizeError(f"Interval size must be a positive integer, got {n!r}")
    n = int(n)

    moves = []
    for i in range(n):
        left = Move(SINK_INDEX, 0.5, BoundarySide.LEFT) if i == 0 else Move(i - 1, 0.5)
        right = (
            Move(SINK_INDEX, 0.5, BoundarySide.RIGHT) if i == n - 1 else Move(i + 1, 0.5)
        )
        moves.append((left, right))

    return Topology(
        vertices=range(1, n + 1),
        sink=0,
        moves=moves,
        name="interval",
        sink_aliases=(n + 1,),
    )


def build_general(
    vertices: Sequence[Hashable],
    kernel: Any,
    sink: Hashable = "z",
) -> Topology:
    """
    Build a topology from an arbitrary kernel.

    Args:
        vertices: Site ids (must not contain the sink id).
        kernel: Either a mapping ``{v: {target: prob}}`` whose targets are
            vertex ids or the sink id, or an (n, n+1) array whose last column
            is the sink.
        sink: Sink id.

    Raises:
        KernelError: negative entries, unknown targets, or a row not summing to 1.
        AccessibilityError: vertices not mutually accessible or sink unreachable.
    """
    vertices = list(vertices)
    if not vertices:
        raise InvalidSizeError("A topology needs at least one vertex")
    if len(set(vertices)) != len(vertices):
        raise KernelError("Duplicate vertex ids")
    if sink in vertices:
        raise KernelError(f"Sink id {sink!r} collides with a vertex id")

    n = len(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    matrix = _kernel_to_matrix(vertices, index, kernel, sink)

    if np.any(matrix < 0):
        raise KernelError("Kernel has negative entries")
    row_sums = matrix.sum(axis=1)
    for v, total in zip(vertices, row_sums):
        if abs(total - 1.0) > ROW_SUM_TOLERANCE:
            raise KernelError(f"Row Q({v!r}, ·) sums to {total!r}, expected 1")

    _check_accessibility(vertices, matrix)

    moves = []
    for i in range(n):
        row = []
        for j in range(n + 1):
            p = float(matrix[i, j])
            if p > 0:
                if j == n:
                    row.append(Move(SINK_INDEX, p, BoundarySide.SINK))
                else:
                    row.append(Move(j, p))
        moves.append(row)

    return Topology(vertices=vertices, sink=sink, moves=moves, name="general")


def _kernel_to_matrix(
    vertices: list,
    index: dict,
    kernel: Any,
    sink: Hashable,
) -> np.ndarray:
    n = len(vertices)
    if isinstance(kernel, Mapping):
        matrix = np.zeros((n, n + 1))
        for v in vertices:
            row = kernel.get(v)
            if row is None:
                raise KernelError(f"No kernel row for vertex {v!r}")
            for target, p in row.items():
                if target == sink:
                    matrix[index[v], n] += float(p)
                elif target in index:
                    matrix[index[v], index[target]] += float(p)
                else:
                    raise KernelError(f"Unknown target {target!r} in row {v!r}")
        return matrix

    matrix = np.asarray(kernel, dtype=float)
    if matrix.shape != (n, n + 1):
        raise KernelError(
            f"Kernel matrix must have shape ({n}, {n + 1}), got {matrix.shape}"
        )
    return matrix


def _check_accessibility(vertices: list, matrix: np.ndarray) -> None:
    """Sink reachable from every vertex; V strongly connected."""
    n = len(vertices)
    adjacency = matrix[:, :n] > 0
    to_sink = matrix[:, n] > 0

    # Reverse search from the sink
    reaches_sink = to_sink.copy()
    frontier = deque(np.flatnonzero(to_sink))
    while frontier:
        w = frontier.popleft()
        for u in np.flatnonzero(adjacency[:, w]):
            if not reaches_sink[u]:
                reaches_sink[u] = True
                frontier.append(u)
    if not reaches_sink.all():
        stuck = [vertices[i] for i in np.flatnonzero(~reaches_sink)]
        raise AccessibilityError(f"Sink not accessible from {stuck}")

    for graph in (adjacency, adjacency.T):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = deque([0])
        while frontier:
            u = frontier.popleft()
            for w in np.flatnonzero(graph[u]):
                if not seen[w]:
                    seen[w] = True
                    frontier.append(w)
        if not seen.all():
            missing = [vertices[i] for i in np.flatnonzero(~seen)]
            raise AccessibilityError(
                f"Vertices not mutually accessible: {missing} vs {vertices[0]!r}"
            )
