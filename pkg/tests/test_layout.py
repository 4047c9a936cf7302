"""Layout generation, cell-count anchors, and patch access rules."""

import json

import pytest

from helpers import cells_connected
from lssched.errors import LayoutError, PatchAccessError
from lssched.layout import (Arch, access_options, generate_layout,
                            layout_cell_count, layout_to_json, mandatory_cells)
from lssched.pauli import parse_product


class TestGeneration:
    def test_published_cell_counts(self):
        bus8 = generate_layout(8, Arch.BUS, 1)
        assert len(bus8.ancilla) == 27
        assert len(bus8.ring) == 24
        assert layout_cell_count(bus8) == 27 + 24 + 8

        bus64 = generate_layout(64, Arch.BUS, 1)
        assert len(bus64.ring) == 60

        pure64 = generate_layout(64, Arch.PURE, 1)
        assert len(pure64.ancilla) == 157
        assert layout_cell_count(pure64) == 221

    def test_density_sweep_counts(self):
        counts = [layout_cell_count(generate_layout(64, Arch.PURE, s))
                  for s in range(1, 6)]
        assert counts == [221, 468, 805, 1232, 1749]

    def test_structure_invariants(self):
        for nq in (1, 2, 3, 7, 8, 17, 64, 101, 200):
            for arch in (Arch.BUS, Arch.PURE):
                lay = generate_layout(nq, arch, 1)
                cells = set(lay.data_cells) | lay.ancilla | lay.ring
                # no overlap between the three classes
                assert len(cells) == (len(lay.data_cells) + len(lay.ancilla)
                                      + len(lay.ring))
                assert all(0 <= x < lay.width and 0 <= y < lay.height
                           for x, y in cells)
                assert lay.qubit_capacity >= nq
                assert len(lay.data_cells) == 2 * len(lay.doubles)
                # every double sits on two horizontally adjacent cells
                for d in lay.doubles:
                    assert d.right == (d.left[0] + 1, d.left[1])
                # ancilla+ring form one connected routing fabric
                flat = {y * lay.width + x for x, y in (lay.ancilla | lay.ring)}
                assert cells_connected(flat, lay.width, lay.width * lay.height)
                if arch is Arch.PURE:
                    assert not lay.ring
                else:
                    # ring cells hug the outer border, corners excluded
                    for x, y in lay.ring:
                        assert (x in (0, lay.width - 1)) != (y in (0, lay.height - 1))

    def test_every_data_cell_has_side_access(self):
        for nq in (2, 8, 63):
            lay = generate_layout(nq, Arch.PURE, 1)
            free = lay.ancilla | lay.ring
            for d in lay.doubles:
                assert (d.left[0] - 1, d.left[1]) in free
                assert (d.right[0] + 1, d.right[1]) in free

    def test_cultivator_sets(self):
        bus = generate_layout(8, Arch.BUS, 1)
        assert set(bus.cultivators) == bus.ring
        pure = generate_layout(8, Arch.PURE, 1)
        assert set(pure.cultivators) == pure.ancilla
        # sorted by (y, x)
        assert list(pure.cultivators) == sorted(pure.cultivators,
                                                key=lambda c: (c[1], c[0]))

    def test_capacity_is_tight(self):
        lay = generate_layout(7, Arch.PURE, 1)
        assert lay.qubit_capacity == 8  # odd count rounds up to a full double

    def test_bad_args(self):
        with pytest.raises(LayoutError):
            generate_layout(0, Arch.PURE, 1)
        with pytest.raises(LayoutError):
            generate_layout(4, Arch.PURE, 0)

    def test_grid_choice_prefers_square(self):
        lay = generate_layout(8, Arch.PURE, 1)  # 4 doubles -> 2x2 beats 1x4
        assert (lay.rows, lay.cols) == (2, 2)

    def test_density_widens_gaps(self):
        lay1 = generate_layout(8, Arch.PURE, 1)
        lay3 = generate_layout(8, Arch.PURE, 3)
        assert lay3.width > lay1.width and lay3.height > lay1.height
        assert layout_cell_count(lay3) > layout_cell_count(lay1)


class TestAccess:
    def setup_method(self):
        self.lay = generate_layout(8, Arch.PURE, 1)

    def spec_modes(self, text, **kwargs):
        return [(s.mode, s.cells)
                for s in access_options(self.lay, parse_product(text), **kwargs)]

    def test_single_qubit_sides(self):
        d0 = self.lay.doubles[0]
        (lx, y), (rx, _) = d0.left, d0.right
        assert self.spec_modes("X0") == [("side_left", ((lx - 1, y),))]
        assert self.spec_modes("Z1") == [("side_right", ((rx + 1, y),))]

    def test_joint_edges(self):
        d0 = self.lay.doubles[0]
        (lx, y), (rx, _) = d0.left, d0.right
        assert self.spec_modes("X0 X1") == [("bottom", ((lx, y + 1), (rx, y + 1)))]
        assert self.spec_modes("Z0 Z1") == [("top", ((lx, y - 1), (rx, y - 1)))]
        assert self.spec_modes("Y0 Y1") == [
            ("both_rows", ((lx, y - 1), (rx, y - 1), (lx, y + 1), (rx, y + 1)))]
        assert self.spec_modes("X0 Z1") == [
            ("both_sides", ((lx - 1, y), (rx + 1, y)))]

    def test_no_horizontal_edges_forces_sides(self):
        d0 = self.lay.doubles[0]
        (lx, y), (rx, _) = d0.left, d0.right
        assert self.spec_modes("X0 X1", allow_horizontal_edges=False) == [
            ("both_sides", ((lx - 1, y), (rx + 1, y)))]

    def test_strict_single_side_rejections(self):
        with pytest.raises(PatchAccessError):
            self.spec_modes("X0 Z1", strict_single_side=True)
        with pytest.raises(PatchAccessError):
            self.spec_modes("X0 X1", allow_horizontal_edges=False,
                            strict_single_side=True)
        # pure joint edges stay fine under strict mode
        assert self.spec_modes("X0 X1", strict_single_side=True)[0][0] == "bottom"

    def test_multi_double_products(self):
        specs = access_options(self.lay, parse_product("X0 Z3 Y4"))
        assert [s.double_id for s in specs] == [0, 1, 2]

    def test_capacity_check(self):
        with pytest.raises(LayoutError):
            access_options(self.lay, parse_product("X8"))

    def test_mandatory_cells_sorted_dedup(self):
        cells = mandatory_cells(self.lay, parse_product("X0 X1 Z2"))
        assert list(cells) == sorted(set(cells), key=lambda c: (c[1], c[0]))


class TestDump:
    def test_json_shape(self):
        lay = generate_layout(8, Arch.BUS, 1)
        doc = json.loads(layout_to_json(lay))
        kinds = {}
        for cell in doc["cells"]:
            kinds.setdefault(cell["kind"], []).append(cell)
        assert len(kinds["data"]) == 8
        roles = {c["role"] for c in kinds["ancilla"]}
        assert roles == {"bus", "magic"}
        assert sum(1 for c in kinds["ancilla"] if c["role"] == "magic") == 24
        pure = json.loads(layout_to_json(generate_layout(8, Arch.PURE, 1)))
        assert {c["role"] for c in pure["cells"] if c["kind"] == "ancilla"} == {
            "cultivator"}
