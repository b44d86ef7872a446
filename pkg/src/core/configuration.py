"""
Configurations σ ∈ {0, s, 1, 2, ...}^V and running odometers f: V → ℕ.

Both are positional (entry i belongs to ``topology.vertices[i]``) and
immutable. A configuration stores one integer code per site: 0 empty,
``SLEEPING`` (-1) for a single sleeping particle, k >= 1 for k active
particles. JSON form uses 0, "s" and k.
"""

from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ConfigurationFormatError


SLEEPING = -1
SLEEP_TOKEN = "s"


def particle_count(code: int) -> int:
    """|σ(v)| with the convention |s| = 1."""
    return 1 if code == SLEEPING else code


def add_codes(a: int, b: int) -> int:
    """0 + x = x; otherwise the particles pool into an active site."""
    if a == 0:
        return b
    if b == 0:
        return a
    return particle_count(a) + particle_count(b)


def _frozen(values: Any) -> np.ndarray:
    arr = np.array(values, dtype=np.int64).reshape(-1)
    arr.setflags(write=False)
    return arr


class Configuration:
    """A particle configuration on the vertices of a topology."""

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[int]):
        arr = _frozen(list(values))
        if arr.size and arr.min() < SLEEPING:
            raise ConfigurationFormatError(
                f"Invalid site code {int(arr.min())}; expected 0, SLEEPING or k >= 1"
            )
        self._values = arr

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "Configuration":
        return cls([0] * n)

    @classmethod
    def ones(cls, n: int) -> "Configuration":
        """1_V: one active particle at every site."""
        return cls([1] * n)

    @classmethod
    def point(cls, n: int, index: int, k: int = 1) -> "Configuration":
        """k·δ_v (k active particles at position ``index``)."""
        values = [0] * n
        values[index] = k
        return cls(values)

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "Configuration":
        """All-active configuration from per-site particle counts."""
        return cls([int(c) for c in counts])

    @classmethod
    def from_json(cls, data: Any) -> "Configuration":
        if not isinstance(data, (list, tuple)):
            raise ConfigurationFormatError(
                f"Configuration must be a JSON array, got {type(data).__name__}"
            )
        codes = []
        for i, entry in enumerate(data):
            if entry == SLEEP_TOKEN:
                codes.append(SLEEPING)
            elif isinstance(entry, bool) or not isinstance(entry, int) or entry < 0:
                raise ConfigurationFormatError(
                    f"Entry {i}: expected 0, \"s\" or a positive integer, got {entry!r}"
                )
            else:
                codes.append(entry)
        return cls(codes)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return int(self._values.size)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, index: int) -> int:
        return int(self._values[index])

    def count(self, index: int) -> int:
        return particle_count(int(self._values[index]))

    def counts(self) -> np.ndarray:
        return np.where(self._values == SLEEPING, 1, self._values)

    def total(self) -> int:
        return int(self.counts().sum())

    def support(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self._values != 0)]

    def active_sites(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self._values >= 1)]

    def sleeping_sites(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self._values == SLEEPING)]

    def has_sleeping(self) -> bool:
        return bool(np.any(self._values == SLEEPING))

    def is_stable(self) -> bool:
        return not bool(np.any(self._values >= 1))

    def is_stable_on(self, indices: Iterable[int]) -> bool:
        idx = list(indices)
        return not bool(np.any(self._values[idx] >= 1)) if idx else True

    def sleeping_mask(self) -> int:
        """Bit mask of sleeping sites; identifies a stable configuration."""
        mask = 0
        for i in self.sleeping_sites():
            mask |= 1 << i
        return mask

    # ------------------------------------------------------------------
    # Algebra
    # ------------------------------------------------------------------

    def __add__(self, other: "Configuration") -> "Configuration":
        if not isinstance(other, Configuration):
            return NotImplemented
        if other.n != self.n:
            raise ConfigurationFormatError(
                f"Cannot add configurations of sizes {self.n} and {other.n}"
            )
        return Configuration(
            add_codes(int(a), int(b)) for a, b in zip(self._values, other._values)
        )

    def activate(self, indices: Iterable[int]) -> "Configuration":
        values = self._values.copy()
        for i in indices:
            if values[i] == SLEEPING:
                values[i] = 1
        return Configuration(values)

    def activate_all(self) -> "Configuration":
        return Configuration(np.where(self._values == SLEEPING, 1, self._values))

    # ------------------------------------------------------------------
    # Serialization & identity
    # ------------------------------------------------------------------

    def to_json(self) -> list:
        return [SLEEP_TOKEN if v == SLEEPING else int(v) for v in self._values]

    def to_list(self) -> list[int]:
        return [int(v) for v in self._values]

    def key(self) -> tuple:
        return tuple(self.to_list())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        body = ",".join(str(x) for x in self.to_json())
        return f"Configuration({body})"


class Odometer:
    """Per-site counts of executed instructions."""

    __slots__ = ("_values",)

    def __init__(self, values: Iterable[int]):
        arr = _frozen(list(values))
        if arr.size and arr.min() < 0:
            raise ConfigurationFormatError("Odometer entries must be non-negative")
        self._values = arr

    @classmethod
    def zeros(cls, n: int) -> "Odometer":
        return cls([0] * n)

    @classmethod
    def from_json(cls, data: Any) -> "Odometer":
        if not isinstance(data, (list, tuple)) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in data
        ):
            raise ConfigurationFormatError("Odometer must be a JSON array of integers")
        return cls(data)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return int(self._values.size)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, index: int) -> int:
        return int(self._values[index])

    def total(self) -> int:
        return int(self._values.sum())

    def dominates(self, other: "Odometer") -> bool:
        return bool(np.all(self._values >= other._values))

    def strictly_dominates(self, other: "Odometer") -> bool:
        return self.dominates(other) and bool(np.any(self._values > other._values))

    def __add__(self, other: "Odometer") -> "Odometer":
        return Odometer(self._values + other._values)

    def __sub__(self, other: "Odometer") -> "Odometer":
        return Odometer(self._values - other._values)

    def to_json(self) -> list[int]:
        return [int(v) for v in self._values]

    def to_list(self) -> list[int]:
        return self.to_json()

    def key(self) -> tuple:
        return tuple(self.to_json())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Odometer):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Odometer({self.to_json()})"
