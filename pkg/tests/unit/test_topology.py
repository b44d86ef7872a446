"""
Unit tests for topologies and base-chain kernels.
"""

import numpy as np
import pytest

from src.core.errors import AccessibilityError, DomainError, InvalidSizeError, KernelError
from src.core.topology import SINK_INDEX, BoundarySide, build_general, build_interval


class TestBuildInterval:
    """Tests for the interval ⟦1,n⟧ with sink {0, n+1}."""

    def test_vertices_and_sink(self, interval3):
        assert interval3.n == 3
        assert interval3.vertices == (1, 2, 3)
        assert interval3.sink == 0
        assert interval3.is_interval

    def test_both_sink_labels(self, interval3):
        assert interval3.is_sink(0)
        assert interval3.is_sink(4)
        assert not interval3.is_sink(1)
        assert not interval3.is_sink(3)

    def test_boundary_moves_are_tagged(self, interval3):
        left_end = interval3.moves[0]
        right_end = interval3.moves[2]
        assert left_end[0].target == SINK_INDEX
        assert left_end[0].side is BoundarySide.LEFT
        assert right_end[1].target == SINK_INDEX
        assert right_end[1].side is BoundarySide.RIGHT
        assert interval3.sides == (BoundarySide.LEFT, BoundarySide.RIGHT)

    def test_kernel_rows_sum_to_one(self, interval8):
        q = interval8.kernel_matrix()
        assert q.shape == (8, 9)
        np.testing.assert_allclose(q.sum(axis=1), 1.0)
        assert q[0, 8] == 0.5
        assert q[7, 8] == 0.5
        assert q[3, 2] == 0.5 and q[3, 4] == 0.5

    def test_substochastic_matrix(self, interval3):
        p = interval3.substochastic_matrix()
        np.testing.assert_allclose(p, [[0, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0]])

    def test_sink_probability(self, interval3):
        assert interval3.sink_probability(0) == 0.5
        assert interval3.sink_probability(0, BoundarySide.RIGHT) == 0.0
        assert interval3.sink_probability(1) == 0.0

    @pytest.mark.parametrize("n,center", [(1, 1), (2, 1), (3, 2), (4, 2), (8, 4), (9, 5)])
    def test_center_is_ceil_half(self, n, center):
        assert build_interval(n).center() == center

    @pytest.mark.parametrize("bad", [0, -3, 2.5, "4"])
    def test_invalid_size(self, bad):
        with pytest.raises(InvalidSizeError):
            build_interval(bad)

    def test_equality(self):
        assert build_interval(5) == build_interval(5)
        assert build_interval(5) != build_interval(6)
        assert hash(build_interval(5)) == hash(build_interval(5))

    def test_index_lookup(self, interval3):
        assert interval3.index_of(2) == 1
        assert interval3.indices_of([3, 1]) == [2, 0]
        assert interval3.label(SINK_INDEX) == 0
        with pytest.raises(DomainError):
            interval3.index_of(7)


class TestBuildGeneral:
    """Tests for topologies built from arbitrary kernels."""

    def test_mapping_kernel(self, triangle):
        assert triangle.n == 3
        assert triangle.sink == "z"
        assert not triangle.is_interval
        assert triangle.sides == (BoundarySide.SINK,)
        assert triangle.center() == "b"

    def test_matrix_kernel(self):
        topology = build_general(["x", "y"], np.array([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]))
        assert topology.n == 2
        np.testing.assert_allclose(topology.kernel_matrix()[:, 2], [0.5, 0.5])

    def test_self_loop_kept_as_move(self):
        topology = build_general(["a"], {"a": {"a": 0.25, "z": 0.75}})
        targets = [m.target for m in topology.moves[0]]
        assert targets == [0, SINK_INDEX]

    def test_row_not_summing_to_one(self):
        with pytest.raises(KernelError, match="sums to"):
            build_general(["a"], {"a": {"z": 0.9}})

    def test_negative_entry(self):
        with pytest.raises(KernelError, match="negative"):
            build_general(["a", "b"], {"a": {"b": 1.5, "z": -0.5}, "b": {"z": 1.0}})

    def test_unknown_target(self):
        with pytest.raises(KernelError, match="Unknown target"):
            build_general(["a"], {"a": {"q": 1.0}})

    def test_missing_row(self):
        with pytest.raises(KernelError, match="No kernel row"):
            build_general(["a", "b"], {"a": {"z": 1.0}})

    def test_sink_collides_with_vertex(self):
        with pytest.raises(KernelError):
            build_general(["z"], {"z": {"z": 1.0}})

    def test_matrix_shape_checked(self):
        with pytest.raises(KernelError, match="shape"):
            build_general(["a", "b"], np.ones((2, 2)) / 2)

    def test_sink_unreachable(self):
        with pytest.raises(AccessibilityError, match="Sink not accessible"):
            build_general(["a", "b", "c"], {
                "a": {"b": 1.0},
                "b": {"a": 1.0},
                "c": {"z": 1.0},
            })

    def test_not_mutually_accessible(self):
        with pytest.raises(AccessibilityError, match="mutually accessible"):
            build_general(["a", "b"], {"a": {"z": 1.0}, "b": {"a": 0.5, "z": 0.5}})

    def test_empty_vertex_set(self):
        with pytest.raises(InvalidSizeError):
            build_general([], {})
