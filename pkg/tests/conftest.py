"""
Shared test fixtures for the ARW lab tests.
"""

import pytest

from src.core.instructions import InstructionSource
from src.core.topology import build_general, build_interval


@pytest.fixture
def tmp_dir(tmp_path):
    """Provide a temporary directory for test outputs."""
    return tmp_path


@pytest.fixture
def interval3():
    return build_interval(3)


@pytest.fixture
def interval8():
    return build_interval(8)


@pytest.fixture
def triangle():
    """Three vertices in a line with a leaky sink at every vertex."""
    return build_general(
        ["a", "b", "c"],
        {
            "a": {"b": 0.5, "z": 0.5},
            "b": {"a": 0.25, "c": 0.25, "z": 0.5},
            "c": {"b": 0.5, "z": 0.5},
        },
        sink="z",
    )


@pytest.fixture
def source3(interval3):
    """Recorded stacks on ⟦1,3⟧ with λ = 1."""
    return InstructionSource(interval3, 1.0, seed=7)


@pytest.fixture
def source8(interval8):
    return InstructionSource(interval8, 1.0, seed=1)


@pytest.fixture
def lab_config(tmp_path):
    """Lab configuration writing into a temporary output directory."""
    from src.utils.config import LabConfig, OracleConfig, PathsConfig

    return LabConfig(
        paths=PathsConfig(output_dir=tmp_path / "outputs"),
        oracle=OracleConfig(suites_file=tmp_path / "missing_suites.yaml"),
    )


@pytest.fixture
def sample_sweep():
    """A small hand-written sweep table in the mixing-sweep schema."""
    import polars as pl

    from src.estimators.sweep import SWEEP_SCHEMA

    rows = [
        {"n": 4, "lambda": 1.0, "t": 0, "lower": 0.9, "upper": 1.4, "p_hat": 1.0,
         "p_lo": 0.99, "p_hi": 1.0, "m_star": 4, "plugin": 0.95, "plugin_lo": 0.9,
         "plugin_hi": 1.0},
        {"n": 4, "lambda": 1.0, "t": 4, "lower": -0.05, "upper": 0.3, "p_hat": 0.01,
         "p_lo": 0.0, "p_hi": 0.02, "m_star": 8, "plugin": None, "plugin_lo": None,
         "plugin_hi": None},
    ]
    return pl.from_dicts(rows, schema=SWEEP_SCHEMA)


class ScriptedSource(InstructionSource):
    """
    Instruction stacks read from per-site scripts.

    Codes are ``SLEEP_CODE`` or a move index into ``topology.moves[v]`` (on the
    interval 0 = left, 1 = right). Entries past the end of a script are
    ``pad``. Derived sources reuse the same scripts.
    """

    def __init__(self, topology, scripts, pad=1, block_size=4):
        super().__init__(topology, 1.0, seed=0, block_size=block_size)
        self.scripts = {topology.index_of(site): list(codes) for site, codes in scripts.items()}
        self.pad = pad

    def block(self, vertex, index):
        script = self.scripts.get(vertex, [])
        start = index * self.block_size
        return [
            script[i] if i < len(script) else self.pad
            for i in range(start, start + self.block_size)
        ]

    def derive(self, *path):
        return self


@pytest.fixture
def scripted():
    """Factory for scripted instruction stacks."""
    return ScriptedSource
