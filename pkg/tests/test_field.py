import hypothesis.strategies as st
import numpy as np
import pytest
from conftest import grid_rows, topologies
from hypothesis import given

from isophote import (
    IntensityGrid,
    PixelCoord,
    Topology,
    apply_operator,
    contours_to_svg,
    contours_to_text,
    discrete_gradient,
    hamiltonian,
    level_curve_set,
    trace_level_contours,
    zero_mask,
)

N4, N8 = Topology.N4, Topology.N8


def ramp_x(w=6, h=5, mv=None):
    vals = np.tile(np.arange(w, dtype=np.int64), (h, 1))
    return IntensityGrid(vals, mv if mv is not None else w - 1)


def block_grid():
    vals = np.zeros((5, 5), dtype=np.int64)
    vals[1:4, 1:4] = 9
    return IntensityGrid(vals, 9)


class TestHamiltonian:
    def test_constant_grid_zero_field(self):
        g = IntensityGrid(np.full((4, 4), 7, dtype=np.int64), 10)
        f = hamiltonian(g)
        assert not f.hx.any() and not f.hy.any()

    def test_ramp_in_x(self):
        f = hamiltonian(ramp_x())
        assert (f.hx[1:-1, 1:-1] == 0).all()
        assert (f.hy[1:-1, 1:-1] == 2).all()

    def test_diagonal_ramp_parallel_field(self):
        yy, xx = np.mgrid[0:5, 0:6]
        g = IntensityGrid(xx + yy, 9)
        f = hamiltonian(g)
        assert (f.hx[1:-1, 1:-1] == -2).all()
        assert (f.hy[1:-1, 1:-1] == 2).all()
        # every vector is collinear with every other one
        cross = f.hx * np.roll(f.hy, 1) - f.hy * np.roll(f.hx, 1)
        assert not cross[1:-1, 1:-1].any()

    @given(st.integers(0, 3), st.integers(0, 3))
    def test_affine_grid_matches_analytic_derivatives(self, a, b):
        yy, xx = np.mgrid[0:6, 0:7]
        g = IntensityGrid(a * xx + b * yy, int((a + b) * 8 + 1))
        f = hamiltonian(g)
        assert (f.hx[1:-1, 1:-1] == -2 * b).all()
        assert (f.hy[1:-1, 1:-1] == 2 * a).all()

    @given(grid_rows())
    def test_orthogonal_to_gradient_exactly(self, rows_mv):
        rows, mv = rows_mv
        g = IntensityGrid.from_rows(rows, mv)
        gx, gy = discrete_gradient(g)
        f = hamiltonian(g)
        assert not (f.hx * gx + f.hy * gy).any()

    def test_vector_at(self):
        f = hamiltonian(ramp_x())
        assert f.vector_at(PixelCoord(2, 2)) == (0, 2)


class TestZeroMask:
    def test_constant_grid_all_zero(self):
        g = IntensityGrid(np.full((3, 4), 5, dtype=np.int64), 9)
        assert zero_mask(hamiltonian(g), 0).all()

    def test_ramp_has_no_zeros(self):
        mask = zero_mask(hamiltonian(ramp_x()), 0)
        assert not mask.any()

    def test_radial_blob_center_is_zero(self):
        yy, xx = np.mgrid[0:7, 0:7]
        vals = np.maximum(0, 20 - (xx - 3) ** 2 - (yy - 3) ** 2)
        g = IntensityGrid(vals, 20)
        mask = zero_mask(hamiltonian(g), 0)
        assert mask[3, 3]
        assert not mask[3, 2] and not mask[2, 3]

    def test_tolerance_widens_the_mask(self):
        f = hamiltonian(ramp_x())
        assert zero_mask(f, 2).all()

    def test_negative_tolerance_rejected(self):
        with pytest.raises(ValueError):
            zero_mask(hamiltonian(ramp_x()), -1)


class TestApplyOperator:
    def test_identity(self):
        g = ramp_x()
        assert apply_operator(g, "identity") is g

    def test_dx_constant_grid_is_bias(self):
        g = IntensityGrid(np.full((3, 4), 9, dtype=np.int64), 12)
        out = apply_operator(g, "dx")
        assert (out.values == 12).all()
        assert out.max_value == 24

    def test_dx_ramp(self):
        out = apply_operator(ramp_x(w=5, h=3, mv=4), "dx")
        assert (out.values == 5).all()  # slope 1 on top of bias 4
        assert out.max_value == 8

    def test_dy_transposes_dx(self):
        rng = np.random.default_rng(7)
        vals = rng.integers(0, 10, size=(4, 6))
        g = IntensityGrid(vals, 9)
        gt = IntensityGrid(vals.T.copy(), 9)
        assert np.array_equal(apply_operator(g, "dy").values, apply_operator(gt, "dx").values.T)

    def test_unknown_operator_rejected(self):
        with pytest.raises(ValueError):
            apply_operator(ramp_x(), "laplace")

    def test_output_feeds_back_into_grids(self):
        out = apply_operator(ramp_x(), "dx")
        assert 0 <= out.values.min() and out.values.max() <= out.max_value


class TestTraceLevelContours:
    def test_block_yields_one_closed_ring(self):
        contours = trace_level_contours(block_grid(), 5, N4)
        assert len(contours) == 1
        contour = contours[0]
        assert contour.closed
        assert contour.pixels == (
            PixelCoord(1, 1), PixelCoord(2, 1), PixelCoord(3, 1), PixelCoord(3, 2),
            PixelCoord(3, 3), PixelCoord(2, 3), PixelCoord(1, 3), PixelCoord(1, 2),
        )

    def test_constant_grid_has_no_contours(self):
        g = IntensityGrid(np.full((4, 4), 3, dtype=np.int64), 9)
        assert trace_level_contours(g, 2, N4) == []

    def test_two_blocks_give_two_contours(self):
        vals = np.zeros((5, 9), dtype=np.int64)
        vals[1:4, 1:4] = 9
        vals[1:4, 5:8] = 9
        g = IntensityGrid(vals, 9)
        contours = trace_level_contours(g, 5, N4)
        assert len(contours) == 2
        assert all(c.closed for c in contours)

    def test_border_touching_contour_is_open(self):
        vals = np.zeros((5, 5), dtype=np.int64)
        vals[0:3, 0:3] = 9
        g = IntensityGrid(vals, 9)
        contours = trace_level_contours(g, 5, N4)
        assert contours and all(not c.closed for c in contours)

    def test_temporal_topology_rejected(self):
        with pytest.raises(ValueError):
            trace_level_contours(block_grid(), 5, Topology.N4T)

    @given(grid_rows(), st.integers(0, 13), topologies)
    def test_chains_partition_the_level_curve_set(self, rows_mv, c, topology):
        rows, mv = rows_mv
        g = IntensityGrid.from_rows(rows, mv)
        contours = trace_level_contours(g, c, topology)
        expected = {(p.x, p.y) for p in level_curve_set(g, c, topology).members}
        seen = []
        for contour in contours:
            seen.extend((p.x, p.y) for p in contour.pixels)
        assert len(seen) == len(set(seen))  # pairwise disjoint, no repeats
        assert set(seen) == expected

    @given(grid_rows(), st.integers(0, 13), topologies)
    def test_chain_steps_are_adjacent(self, rows_mv, c, topology):
        rows, mv = rows_mv
        g = IntensityGrid.from_rows(rows, mv)
        offsets = set(topology.spatial_offsets)
        for contour in trace_level_contours(g, c, topology):
            pts = contour.pixels
            for a, b in zip(pts, pts[1:]):
                assert (b.x - a.x, b.y - a.y) in offsets
            if contour.closed and len(pts) > 1:
                assert (pts[0].x - pts[-1].x, pts[0].y - pts[-1].y) in offsets
                assert all(
                    0 < p.x < g.width - 1 and 0 < p.y < g.height - 1 for p in pts
                )


class TestExports:
    def test_svg_golden(self):
        contours = trace_level_contours(block_grid(), 5, N4)
        svg = contours_to_svg(contours, 5, 5)
        assert svg == (
            '<svg xmlns="http://www.w3.org/2000/svg" width="5" height="5" viewBox="0 0 5 5">\n'
            '<polygon points="1.5,1.5 2.5,1.5 3.5,1.5 3.5,2.5 3.5,3.5 2.5,3.5 1.5,3.5 1.5,2.5"'
            ' fill="none" stroke="black" stroke-width="0.25"/>\n'
            "</svg>\n"
        )

    def test_text_golden(self):
        contours = trace_level_contours(block_grid(), 5, N4)
        assert contours_to_text(contours) == "1,1 2,1 3,1 3,2 3,3 2,3 1,3 1,2 Z\n"

    def test_text_empty(self):
        assert contours_to_text([]) == ""
