"""
Seed layering and counter-based uniform streams.

``derive_seed(master, *path)`` turns a master seed and a key path into an
independent 64-bit sub-seed:

    SeedSequence(entropy=master, spawn_key=path').generate_state(2, uint32)

combined little-endian into 64 bits, where string components of ``path`` are
mapped to integers by BLAKE2b-64 of their UTF-8 bytes. Any slice of an
experiment can be rerun by re-deriving its sub-seed from the master seed.

``CounterStream`` gives uniform draws u(j), j >= 1, as a pure function of
(seed, stream, j) using the Philox4x64 block cipher: the key is
(seed, stream), counter word 1 carries the block index, so blocks never
overlap and any block can be regenerated on demand.
"""

import hashlib
from typing import Union

import numpy as np


PathComponent = Union[int, str]

U64_MAX = 2**64 - 1


def _component(value: PathComponent) -> int:
    if isinstance(value, str):
        digest = hashlib.blake2b(value.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    if isinstance(value, (bool,)) or not isinstance(value, (int, np.integer)) or value < 0:
        raise ValueError(f"Seed path components must be str or non-negative int, got {value!r}")
    return int(value)


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValueError(f"Seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) <= U64_MAX:
        raise ValueError(f"Seed must fit in 64 bits, got {seed}")
    return int(seed)


def derive_seed(master: int, *path: PathComponent) -> int:
    """Keyed 64-bit sub-seed of ``master`` along ``path``."""
    sequence = np.random.SeedSequence(
        entropy=check_seed(master),
        spawn_key=tuple(_component(p) for p in path),
    )
    lo, hi = sequence.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def generator(seed: int, *path: PathComponent) -> np.random.Generator:
    """Sequential numpy generator for a derived sub-seed."""
    return np.random.default_rng(derive_seed(seed, *path) if path else check_seed(seed))


class CounterStream:
    """Random-access uniforms keyed by (seed, stream, index)."""

    def __init__(self, seed: int, stream: int = 0, block_size: int = 1024):
        self.seed = check_seed(seed)
        self.stream = int(stream)
        self.block_size = int(block_size)
        self._key = (self.seed << 64) | self.stream
        self._cached_index = -1
        self._cached_block: np.ndarray = np.empty(0)

    def block(self, index: int) -> np.ndarray:
        """Uniforms for j in [index*B + 1, (index+1)*B]."""
        if index == self._cached_index:
            return self._cached_block
        bit_generator = np.random.Philox(key=self._key, counter=int(index) << 64)
        values = np.random.Generator(bit_generator).random(self.block_size)
        self._cached_index, self._cached_block = index, values
        return values

    def uniform(self, j: int) -> float:
        """u(j) for j >= 1."""
        b, offset = divmod(j - 1, self.block_size)
        return float(self.block(b)[offset])
