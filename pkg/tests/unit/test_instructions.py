"""
Unit tests for seeds, counter streams and instruction stacks.
"""

import pickle

import numpy as np
import pytest

from src.core.errors import DomainError, UnsupportedIndexError
from src.core.instructions import (
    SLEEP_CODE,
    InstructionKind,
    InstructionSource,
    SourceMode,
)
from src.core.topology import BoundarySide, build_interval


class TestSeeds:
    """Tests for keyed sub-seed derivation."""

    def test_derive_is_deterministic(self):
        from src.utils.seeds import derive_seed
        assert derive_seed(42, "replica", 3) == derive_seed(42, "replica", 3)

    def test_paths_are_independent(self):
        from src.utils.seeds import derive_seed
        seeds = {
            derive_seed(42, "replica", 3),
            derive_seed(42, "replica", 4),
            derive_seed(42, "step", 3),
            derive_seed(43, "replica", 3),
        }
        assert len(seeds) == 4

    def test_fits_in_64_bits(self):
        from src.utils.seeds import U64_MAX, derive_seed
        for i in range(20):
            assert 0 <= derive_seed(2**64 - 1, "x", i) <= U64_MAX

    @pytest.mark.parametrize("bad", [-1, 2**64, 1.5, "7", True])
    def test_check_seed_rejects(self, bad):
        from src.utils.seeds import check_seed
        with pytest.raises(ValueError):
            check_seed(bad)

    def test_negative_path_component(self):
        from src.utils.seeds import derive_seed
        with pytest.raises(ValueError):
            derive_seed(1, -2)

    def test_counter_stream_random_access(self):
        from src.utils.seeds import CounterStream
        sequential = CounterStream(9, block_size=16)
        values = [sequential.uniform(j) for j in range(1, 60)]
        fresh = CounterStream(9, block_size=16)
        assert fresh.uniform(45) == values[44]
        assert fresh.uniform(3) == values[2]

    def test_counter_stream_streams_differ(self):
        from src.utils.seeds import CounterStream
        assert CounterStream(9, stream=0).uniform(1) != CounterStream(9, stream=1).uniform(1)


class TestInstructionSource:
    """Tests for recorded and ephemeral instruction stacks."""

    def test_recorded_is_reproducible(self, interval3):
        a = InstructionSource(interval3, 1.0, seed=5)
        b = InstructionSource(interval3, 1.0, seed=5)
        for v in range(3):
            assert [a.code(v, j) for j in range(1, 200)] == [b.code(v, j) for j in range(1, 200)]

    def test_random_access_matches_sequential(self, interval3):
        sequential = InstructionSource(interval3, 1.0, seed=5, block_size=32)
        codes = [sequential.code(1, j) for j in range(1, 101)]
        direct = InstructionSource(interval3, 1.0, seed=5, block_size=32)
        assert direct.code(1, 77) == codes[76]
        assert direct.code(1, 2) == codes[1]

    def test_blocks_regenerate_identically(self, interval3):
        a = InstructionSource(interval3, 1.0, seed=5, block_size=1024)
        b = InstructionSource(interval3, 1.0, seed=5, block_size=1024)
        assert a.block(0, 3) == b.block(0, 3)

    def test_seeds_differ(self, interval3):
        a = InstructionSource(interval3, 1.0, seed=1)
        b = InstructionSource(interval3, 1.0, seed=2)
        assert [a.code(0, j) for j in range(1, 65)] != [b.code(0, j) for j in range(1, 65)]

    def test_index_must_be_positive(self, source3):
        with pytest.raises(UnsupportedIndexError):
            source3.code(0, 0)
        with pytest.raises(UnsupportedIndexError):
            source3.instruction(1, -1)

    @pytest.mark.parametrize("rate", [0, -1.0, float("inf"), float("nan"), "1"])
    def test_invalid_sleep_rate(self, interval3, rate):
        with pytest.raises(DomainError):
            InstructionSource(interval3, rate)

    def test_sleep_frequency(self, interval3):
        source = InstructionSource(interval3, 1.0, seed=11)
        codes = np.asarray([source.code(1, j) for j in range(1, 20_001)])
        assert abs((codes == SLEEP_CODE).mean() - 0.5) < 0.02

    def test_sleep_frequency_small_rate(self, interval3):
        source = InstructionSource(interval3, 0.25, seed=11)
        assert source.p_sleep == pytest.approx(0.2)
        codes = np.asarray([source.code(0, j) for j in range(1, 20_001)])
        assert abs((codes == SLEEP_CODE).mean() - 0.2) < 0.02

    def test_jump_directions_balanced(self, interval3):
        source = InstructionSource(interval3, 1.0, seed=12)
        codes = np.asarray([source.code(1, j) for j in range(1, 20_001)])
        jumps = codes[codes != SLEEP_CODE]
        assert set(np.unique(jumps)) <= {0, 1}
        assert abs((jumps == 1).mean() - 0.5) < 0.03

    def test_instruction_lookup(self, source3):
        seen = set()
        for j in range(1, 200):
            instr = source3.instruction(1, j)
            if instr.is_sleep:
                assert instr.destination is None
            else:
                assert instr.kind is InstructionKind.JUMP
                assert instr.destination in (0, 2)
                if instr.destination == 0:
                    assert instr.side is BoundarySide.LEFT
            seen.add(instr.kind)
        assert seen == {InstructionKind.SLEEP, InstructionKind.JUMP}

    def test_sink_has_no_stack(self, source3):
        with pytest.raises(DomainError):
            source3.instruction(0, 1)

    def test_derive(self, source3):
        child = source3.derive("replica", 1)
        again = source3.derive("replica", 1)
        assert child.seed != source3.seed
        assert child.topology is source3.topology
        assert child.sleep_rate == source3.sleep_rate
        assert [child.code(0, j) for j in range(1, 50)] == [again.code(0, j) for j in range(1, 50)]

    def test_pickle_drops_cache(self, source3):
        before = [source3.code(2, j) for j in range(1, 30)]
        clone = pickle.loads(pickle.dumps(source3))
        assert clone._blocks == {}
        assert [clone.code(2, j) for j in range(1, 30)] == before

    def test_ephemeral_mode(self, interval3):
        source = InstructionSource(interval3, 1.0, seed=3, mode=SourceMode.EPHEMERAL)
        assert not source.is_recorded
        codes = [source.code(0, j) for j in range(1, 100)]
        assert set(codes) <= {SLEEP_CODE, 0, 1}

    def test_general_topology_codes(self, triangle):
        source = InstructionSource(triangle, 1.0, seed=4)
        # "b" has three moves: a, c and the sink
        codes = {source.code(1, j) for j in range(1, 500)}
        assert codes == {SLEEP_CODE, 0, 1, 2}

    def test_repr(self):
        source = InstructionSource(build_interval(2), 2.0, seed=1)
        assert "lambda=2.0" in repr(source)
