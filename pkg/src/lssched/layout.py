"""Grid layouts for double-qubit patches, in two architectures.

Doubles (2x1 patches hosting qubits 2k, 2k+1) are arranged row-major in
an r x c grid separated by ancilla lanes of width s (the density). The
"pure" architecture cultivates magic states on every interior ancilla
cell; the "bus" architecture reserves interior ancilla for routing and
adds a perimeter ring of dedicated magic cells (corners excluded).

Coordinates are (x, y) with x = column, y = row, origin top-left. In bus
layouts the ring occupies the outermost rows/columns and the interior is
offset by (1, 1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import LayoutError, PatchAccessError
from .pauli import PauliProduct

Coord = tuple[int, int]


class Arch(str, Enum):
    BUS = "bus"
    PURE = "pure"


@dataclass(frozen=True)
class Double:
    id: int
    qubit_lo: int
    qubit_hi: int
    left: Coord
    right: Coord


@dataclass(frozen=True)
class AccessSpec:
    """Mandatory ancilla cells one product needs at one double."""

    double_id: int
    mode: str  # side_left | side_right | top | bottom | both_rows | both_sides
    cells: tuple[Coord, ...]


@dataclass(frozen=True)
class Layout:
    arch: Arch
    density: int
    num_data_qubits: int
    width: int
    height: int
    rows: int
    cols: int
    interior_origin: Coord
    interior_size: tuple[int, int]
    doubles: tuple[Double, ...]
    data_cells: dict[Coord, tuple[int, str]]  # coord -> (double_id, left|right)
    ancilla: frozenset[Coord]  # interior ancilla
    ring: frozenset[Coord]  # bus perimeter magic cells (empty for pure)

    @property
    def cultivators(self) -> tuple[Coord, ...]:
        """Cells that cultivate magic, sorted by (y, x)."""
        cells = self.ring if self.arch is Arch.BUS else self.ancilla
        return tuple(sorted(cells, key=lambda c: (c[1], c[0])))

    @property
    def qubit_capacity(self) -> int:
        return 2 * len(self.doubles)


def _choose_grid(num_doubles: int, s: int) -> tuple[int, int]:
    """Pick (rows, cols) minimizing interior area, then |w-h|, then rows."""
    best = None
    best_key = None
    for c in range(1, num_doubles + 1):
        r = math.ceil(num_doubles / c)
        w = c * (2 + s) + s
        h = r * (1 + s) + s
        key = (w * h, abs(w - h), r)
        if best_key is None or key < best_key:
            best_key = key
            best = (r, c)
    return best


def generate_layout(num_data_qubits: int, arch: Arch | str, density: int = 1) -> Layout:
    if num_data_qubits < 1:
        raise LayoutError("need at least one data qubit")
    if density < 1:
        raise LayoutError("density must be >= 1")
    arch = Arch(arch)
    s = density
    num_doubles = (num_data_qubits + 1) // 2
    r, c = _choose_grid(num_doubles, s)
    w_in = c * (2 + s) + s
    h_in = r * (1 + s) + s
    ox, oy = (1, 1) if arch is Arch.BUS else (0, 0)

    doubles = []
    data_cells: dict[Coord, tuple[int, str]] = {}
    for did in range(num_doubles):
        i, j = divmod(did, c)
        left = (ox + s + j * (2 + s), oy + s + i * (1 + s))
        right = (left[0] + 1, left[1])
        doubles.append(Double(did, 2 * did, 2 * did + 1, left, right))
        data_cells[left] = (did, "left")
        data_cells[right] = (did, "right")

    ancilla = frozenset(
        (ox + x, oy + y)
        for y in range(h_in)
        for x in range(w_in)
        if (ox + x, oy + y) not in data_cells
    )
    ring: frozenset[Coord] = frozenset()
    width, height = w_in, h_in
    if arch is Arch.BUS:
        width, height = w_in + 2, h_in + 2
        ring = frozenset(
            [(x, 0) for x in range(1, w_in + 1)]
            + [(x, h_in + 1) for x in range(1, w_in + 1)]
            + [(0, y) for y in range(1, h_in + 1)]
            + [(w_in + 1, y) for y in range(1, h_in + 1)]
        )

    return Layout(
        arch=arch,
        density=s,
        num_data_qubits=num_data_qubits,
        width=width,
        height=height,
        rows=r,
        cols=c,
        interior_origin=(ox, oy),
        interior_size=(w_in, h_in),
        doubles=tuple(doubles),
        data_cells=data_cells,
        ancilla=ancilla,
        ring=ring,
    )


def layout_cell_count(layout: Layout) -> int:
    """Total cells N (data + interior ancilla + ring); volume is N * cycles."""
    return len(layout.data_cells) + len(layout.ancilla) + len(layout.ring)


# ---------------------------------------------------------------------------
# Patch access

def access_options(
    layout: Layout,
    product: PauliProduct,
    allow_horizontal_edges: bool = True,
    strict_single_side: bool = False,
) -> list[AccessSpec]:
    """Mandatory adjacent cells per data double touched by the product.

    A single qubit is reached through the ancilla cell beside its half.
    When both qubits of a double appear: XX uses the two cells below the
    patch (joint XX edge), ZZ the two above, YY all four. Mixed pairs
    have no joint edge and use both side cells for the same product,
    unless strict_single_side forbids that. With horizontal edges
    disabled every two-qubit pattern falls back to the two side cells.
    """
    by_double: dict[int, list[tuple[int, str]]] = {}
    for q, op in product.ops:
        if q >= layout.qubit_capacity:
            raise LayoutError(f"product {product.seq} uses qubit {q}, "
                              f"layout capacity is {layout.qubit_capacity}")
        by_double.setdefault(q // 2, []).append((q, op))

    specs = []
    for did in sorted(by_double):
        dbl = layout.doubles[did]
        (lx, y), (rx, _) = dbl.left, dbl.right
        qops = by_double[did]
        if len(qops) == 1:
            q, _ = qops[0]
            if q == dbl.qubit_lo:
                specs.append(AccessSpec(did, "side_left", ((lx - 1, y),)))
            else:
                specs.append(AccessSpec(did, "side_right", ((rx + 1, y),)))
            continue
        pattern = (qops[0][1], qops[1][1])
        sides = ((lx - 1, y), (rx + 1, y))
        if not allow_horizontal_edges:
            if strict_single_side:
                raise PatchAccessError(
                    f"product {product.seq} needs both sides of double {did} "
                    "with horizontal edges disabled and strict single-side set")
            specs.append(AccessSpec(did, "both_sides", sides))
        elif pattern == ("X", "X"):
            specs.append(AccessSpec(did, "bottom", ((lx, y + 1), (rx, y + 1))))
        elif pattern == ("Z", "Z"):
            specs.append(AccessSpec(did, "top", ((lx, y - 1), (rx, y - 1))))
        elif pattern == ("Y", "Y"):
            specs.append(AccessSpec(
                did, "both_rows",
                ((lx, y - 1), (rx, y - 1), (lx, y + 1), (rx, y + 1))))
        else:
            if strict_single_side:
                raise PatchAccessError(
                    f"product {product.seq} mixes {pattern[0]} and {pattern[1]} "
                    f"on double {did}, which needs both sides at once")
            specs.append(AccessSpec(did, "both_sides", sides))
    return specs


def mandatory_cells(layout: Layout, product: PauliProduct, **kwargs) -> tuple[Coord, ...]:
    """Deduplicated, sorted union of all access cells for the product."""
    cells = set()
    for spec in access_options(layout, product, **kwargs):
        cells.update(spec.cells)
    return tuple(sorted(cells, key=lambda c: (c[1], c[0])))


# ---------------------------------------------------------------------------
# Dump format

def layout_to_json(layout: Layout) -> str:
    cells = []
    for y in range(layout.height):
        for x in range(layout.width):
            coord = (x, y)
            if coord in layout.data_cells:
                did, _ = layout.data_cells[coord]
                cells.append({"x": x, "y": y, "kind": "data", "double_id": did})
            elif coord in layout.ancilla:
                role = "cultivator" if layout.arch is Arch.PURE else "bus"
                cells.append({"x": x, "y": y, "kind": "ancilla", "role": role})
            elif coord in layout.ring:
                cells.append({"x": x, "y": y, "kind": "ancilla", "role": "magic"})
    doc = {
        "arch": layout.arch.value,
        "width": layout.width,
        "height": layout.height,
        "cells": cells,
    }
    return json.dumps(doc, indent=1) + "\n"
