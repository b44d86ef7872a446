"""
Driving sequences u_1, u_2, ...: where the chain injects its particles.

- Central:  ⌈n/2⌉ on the interval (``Topology.center()`` in general)
- Uniform:  i.i.d. uniform vertices, u_t a pure function of (seed, t)
- Explicit: a fixed list of sites
"""

from enum import Enum
from typing import Hashable, List, Optional, Sequence

from ..core.errors import InvalidDrivingError
from ..core.topology import Topology
from ..utils.seeds import CounterStream, PathComponent, check_seed, derive_seed


class DrivingKind(str, Enum):
    UNIFORM = "uniform"
    CENTRAL = "central"
    EXPLICIT = "explicit"


class DrivingSequence:
    """Site selection for every chain step t >= 1."""

    def __init__(
        self,
        kind: DrivingKind,
        seed: int = 0,
        sites: Optional[Sequence[Hashable]] = None,
    ):
        self.kind = DrivingKind(kind)
        self.seed = check_seed(seed)
        self.sites: tuple = tuple(sites or ())
        if self.kind is DrivingKind.EXPLICIT and not self.sites:
            raise InvalidDrivingError("Explicit driving needs at least one site")
        self._stream: Optional[CounterStream] = None

    @classmethod
    def uniform(cls, seed: int = 0) -> "DrivingSequence":
        return cls(DrivingKind.UNIFORM, seed=seed)

    @classmethod
    def central(cls) -> "DrivingSequence":
        return cls(DrivingKind.CENTRAL)

    @classmethod
    def explicit(cls, sites: Sequence[Hashable]) -> "DrivingSequence":
        return cls(DrivingKind.EXPLICIT, sites=sites)

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "DrivingSequence":
        """'central', 'uniform' or 'uniform:<seed>'."""
        name, _, arg = str(text).strip().lower().partition(":")
        if name == DrivingKind.CENTRAL.value:
            return cls.central()
        if name == DrivingKind.UNIFORM.value:
            return cls.uniform(int(arg) if arg else seed)
        raise InvalidDrivingError(f"Unknown driving {text!r}; use 'central' or 'uniform'")

    def __repr__(self) -> str:
        if self.kind is DrivingKind.UNIFORM:
            return f"DrivingSequence(uniform, seed={self.seed})"
        if self.kind is DrivingKind.EXPLICIT:
            return f"DrivingSequence(explicit, {list(self.sites)})"
        return "DrivingSequence(central)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DrivingSequence):
            return NotImplemented
        return (self.kind, self.seed, self.sites) == (other.kind, other.seed, other.sites)

    def __hash__(self) -> int:
        return hash((self.kind, self.seed, self.sites))

    def __getstate__(self) -> dict:
        state = self.__dict__.copy()
        state["_stream"] = None
        return state

    def derive(self, *path: PathComponent) -> "DrivingSequence":
        """Independent copy for a replica; only uniform driving carries randomness."""
        if self.kind is DrivingKind.UNIFORM:
            return DrivingSequence.uniform(derive_seed(self.seed, *path))
        return self

    def site(self, t: int, topology: Topology) -> Hashable:
        """u_t for t >= 1."""
        if t < 1:
            raise InvalidDrivingError(f"Driving steps start at t=1, got {t}")
        if self.kind is DrivingKind.CENTRAL:
            return topology.center()
        if self.kind is DrivingKind.EXPLICIT:
            if t > len(self.sites):
                raise InvalidDrivingError(
                    f"Explicit driving has {len(self.sites)} sites, step {t} requested"
                )
            return self.sites[t - 1]

        if self._stream is None:
            self._stream = CounterStream(self.seed)
        index = int(self._stream.uniform(t) * topology.n)
        return topology.vertices[min(index, topology.n - 1)]

    def sites_up_to(self, t: int, topology: Topology) -> List[Hashable]:
        return [self.site(s, topology) for s in range(1, t + 1)]
