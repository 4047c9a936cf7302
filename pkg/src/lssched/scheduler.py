"""Greedy per-cycle packing of Pauli products onto a layout.

Each cycle: advance cultivation, collect the available products (all
predecessors finished in earlier cycles), then pack greedily. Under
minfit packing every available product's cheapest tree is recomputed
after every commit and the smallest tree wins (ties: lowest seq); under
random_order a seeded permutation is walked once, committing each
first-found tree. Committed products finish within their cycle; in the
pure architecture every ancilla cell a tree used restarts cultivation
for the next cycle, in the bus architecture only consumed magic cells
do.

Randomness discipline (one generator, documented draw order) makes runs
byte-reproducible: construction draws one cultivation sample per
cultivator in (y, x) order; each cycle draws the packing permutation
(random_order mode only, when candidates exist) and then one sample per
restarted cell in (y, x) order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cultivation import CultivationParams, CultivationState
from .errors import LayoutError, StarvationError, ValidationError
from .layout import Arch, Coord, Layout, access_options, generate_layout, layout_cell_count
from .pauli import TaskGraph

_CYCLE_LIMIT = 5_000_000  # defensive bound, far above any legitimate schedule


@dataclass(frozen=True)
class SchedulerConfig:
    arch: Arch = Arch.PURE
    cultivation: CultivationParams = field(default_factory=CultivationParams)
    instant_magic: bool = False
    packing: str = "minfit"  # minfit | random_order
    allow_horizontal_edges: bool = True
    ready_routing_penalty: int = 0
    seed: int = 0
    bus_ring_intermediates: bool = False
    strict_single_side: bool = False

    def __post_init__(self):
        if self.packing not in ("minfit", "random_order"):
            raise ValueError(f"unknown packing {self.packing!r}")
        if self.ready_routing_penalty < 0:
            raise ValueError("ready_routing_penalty must be >= 0")

    def echo(self) -> dict:
        return {
            "arch": self.arch.value,
            "lambda": self.cultivation.lam,
            "distance": self.cultivation.distance,
            "min_cycles": self.cultivation.min_cycles,
            "instant_magic": self.instant_magic,
            "packing": self.packing,
            "allow_horizontal_edges": self.allow_horizontal_edges,
            "ready_routing_penalty": self.ready_routing_penalty,
            "bus_ring_intermediates": self.bus_ring_intermediates,
            "strict_single_side": self.strict_single_side,
        }


def baseline_compat_config(seed: int = 0) -> SchedulerConfig:
    """Bus, instant magic, side access only, random-order packing."""
    return SchedulerConfig(
        arch=Arch.BUS,
        instant_magic=True,
        packing="random_order",
        allow_horizontal_edges=False,
        seed=seed,
    )


@dataclass(frozen=True)
class CommitRecord:
    cycle: int
    seq: int
    weight: int
    magic_cell: Coord
    cells: tuple[Coord, ...]  # sorted by (x, y)


@dataclass(frozen=True)
class ScheduleResult:
    cycles: int
    records: tuple[CommitRecord, ...]
    num_products: int
    num_layers: int
    n_cells: int
    n_ref_cells: int
    cultivation_completed: int
    cultivation_terminated: int
    avg_completed_cultivation: float | None
    ready_used_for_routing: int
    seed: int
    config: SchedulerConfig

    @property
    def volume(self) -> int:
        return self.n_cells * self.cycles

    @property
    def parallel_efficiency(self) -> float:
        return self.num_layers / self.cycles if self.cycles else 1.0

    @property
    def scheduling_efficiency(self) -> float:
        if not self.cycles:
            return 1.0
        return (self.n_ref_cells * self.num_layers) / (self.n_cells * self.cycles)


def reference_cell_count(num_data_qubits: int) -> int:
    """Cell count of the compact pure layout; the volume baseline."""
    return layout_cell_count(generate_layout(num_data_qubits, Arch.PURE, 1))


def run_schedule(graph: TaskGraph, layout: Layout, config: SchedulerConfig) -> ScheduleResult:
    if config.arch is not layout.arch:
        raise LayoutError(f"config arch {config.arch.value} != layout arch {layout.arch.value}")
    width, height = layout.width, layout.height
    n = width * height

    def flat(c: Coord) -> int:
        return c[1] * width + c[0]

    ancilla_mask = np.zeros(n, dtype=np.uint8)
    for c in layout.ancilla:
        ancilla_mask[flat(c)] = 1
    ring_mask = np.zeros(n, dtype=np.uint8)
    for c in layout.ring:
        ring_mask[flat(c)] = 1
    cultivators = layout.cultivators
    cult_flat = np.array([flat(c) for c in cultivators], dtype=np.int64)
    magic_capable = ring_mask if layout.arch is Arch.BUS else ancilla_mask

    nprod = graph.num_products
    term_lists = []
    doubles_by_product = []
    for p in graph.products:
        specs = access_options(
            layout, p,
            allow_horizontal_edges=config.allow_horizontal_edges,
            strict_single_side=config.strict_single_side,
        )
        cells = sorted({flat(c) for s in specs for c in s.cells})
        term_lists.append(cells)
        doubles_by_product.append(frozenset(s.double_id for s in specs))
    term_offsets = np.zeros(nprod + 1, dtype=np.int32)
    for i, cells in enumerate(term_lists):
        term_offsets[i + 1] = term_offsets[i] + len(cells)
    term_cells = np.array(
        [c for cells in term_lists for c in cells], dtype=np.int32
    ) if nprod else np.zeros(0, dtype=np.int32)

    rng = np.random.default_rng(config.seed)
    state = None
    if not config.instant_magic:
        state = CultivationState(cultivators, config.cultivation, rng)
        cult_index = {cell: i for i, cell in enumerate(state.cells)}

    pending = [len(p) for p in graph.preds]
    available = sorted(i for i in range(nprod) if pending[i] == 0)
    scheduled = bytearray(nprod)
    records: list[CommitRecord] = []
    done = 0
    cycle = 0
    ready_used_for_routing = 0
    zeros = np.zeros(n, dtype=np.uint8)

    while done < nprod:
        cycle += 1
        if cycle > _CYCLE_LIMIT:
            raise StarvationError(f"no convergence after {_CYCLE_LIMIT} cycles")

        ready_mask = np.zeros(n, dtype=np.uint8)
        if config.instant_magic:
            ready_mask |= magic_capable
        else:
            ready_idx = state.advance(cycle)
            ready_mask[cult_flat[ready_idx]] = 1

        passable = ancilla_mask.copy()
        if layout.arch is Arch.BUS and config.bus_ring_intermediates:
            passable |= ring_mask & ready_mask
        if layout.arch is Arch.BUS and not config.bus_ring_intermediates:
            leaf_only = ring_mask
        else:
            leaf_only = zeros

        committed = _pack_cycle(
            cycle, available, scheduled, doubles_by_product,
            width, height, passable, ready_mask, leaf_only,
            term_offsets, term_cells, term_lists, flat,
            config, rng, records,
        )

        if not committed:
            if config.instant_magic or not state.any_cultivating():
                waiting = len(available)
                raise StarvationError(
                    f"cycle {cycle}: nothing scheduled, nothing cultivating, "
                    f"{waiting} product(s) waiting")
        else:
            done += len(committed)
            unlocked = []
            for seq in committed:
                for s in graph.succs[seq]:
                    pending[s] -= 1
                    if pending[s] == 0:
                        unlocked.append(s)
            available = sorted(
                [s for s in available if not scheduled[s]] + unlocked)

            if not config.instant_magic:
                consumed = {records[i].magic_cell for i in
                            range(len(records) - len(committed), len(records))}
                destroyed = set()
                for i in range(len(records) - len(committed), len(records)):
                    for cell in records[i].cells:
                        if cell in cult_index:
                            destroyed.add(cell)
                for cell in sorted(destroyed, key=lambda c: (c[1], c[0])):
                    idx = cult_index[cell]
                    if state.is_ready(idx) and cell not in consumed:
                        ready_used_for_routing += 1
                    state.restart(idx, cycle)

    return ScheduleResult(
        cycles=cycle if nprod else 0,
        records=tuple(records),
        num_products=nprod,
        num_layers=graph.num_layers,
        n_cells=layout_cell_count(layout),
        n_ref_cells=reference_cell_count(layout.num_data_qubits),
        cultivation_completed=state.completed_count if state else 0,
        cultivation_terminated=state.terminated_count if state else 0,
        avg_completed_cultivation=state.avg_completed_cultivation() if state else None,
        ready_used_for_routing=ready_used_for_routing,
        seed=config.seed,
        config=config,
    )


def _pack_cycle(cycle, available, scheduled, doubles_by_product,
                width, height, passable, ready_mask, leaf_only,
                term_offsets, term_cells, term_lists, flat,
                config, rng, records):
    """Pack one cycle in place; returns the committed seq list."""
    committed: list[int] = []
    used_doubles: set[int] = set()

    def commit(seq: int, cells: list[int], magic: int):
        coords = sorted(((c % width, c // width) for c in cells))
        records.append(CommitRecord(
            cycle=cycle, seq=seq, weight=len(cells),
            magic_cell=(magic % width, magic // width), cells=tuple(coords)))
        idx = np.array(cells, dtype=np.int64)
        passable[idx] = 0
        ready_mask[idx] = 0
        scheduled[seq] = 1
        used_doubles.update(doubles_by_product[seq])
        committed.append(seq)

    if config.packing == "random_order":
        if available:
            perm = rng.permutation(len(available))
            for p in perm:
                seq = available[p]
                if not doubles_by_product[seq].isdisjoint(used_doubles):
                    continue
                status, cells, magic = kernels.find_tree(
                    width, height, passable, ready_mask, leaf_only,
                    term_lists[seq], config.ready_routing_penalty, 0)
                if status == kernels.FOUND:
                    commit(seq, cells, magic)
        return committed

    failed: set[int] = set()
    while True:
        order = [s for s in available
                 if not scheduled[s] and s not in failed
                 and doubles_by_product[s].isdisjoint(used_doubles)]
        if not order:
            break
        winner, cells, magic, hard_fail = kernels.best_fit(
            width, height, passable, ready_mask, leaf_only,
            term_offsets, term_cells, np.array(order, dtype=np.int32),
            config.ready_routing_penalty)
        for p in hard_fail:
            failed.add(order[p])
        if winner < 0:
            break
        commit(order[winner], cells, magic)
    return committed


# ---------------------------------------------------------------------------
# Derived quantities

def efficiency_upper_bound(layout: Layout, graph: TaskGraph,
                           config: SchedulerConfig) -> float:
    """Best scheduling efficiency allowed by magic-state production.

    On average R = M / E[cycles] states become ready per cycle (M
    cultivating cells, all assumed undisturbed), so P products need at
    least P / R cycles, and never fewer than the layer count.
    """
    mean = 1.0 if config.instant_magic else config.cultivation.mean_cycles()
    m = len(layout.cultivators)
    rate = m / mean
    layers = graph.num_layers
    t_min = max(layers, graph.num_products / rate)
    if t_min == 0:
        return 1.0
    n = layout_cell_count(layout)
    return (reference_cell_count(layout.num_data_qubits) * layers) / (n * t_min)


def error_proxy(p_l: float, n: int, t: int) -> float:
    """Failure-probability proxy: per-qubit-per-cycle rate times volume."""
    return p_l * n * t


def logical_error_rate(eps: float, eps_th: float, d: int, a: float = 1.0) -> float:
    """Suppression scaling a * (eps/eps_th)^((d+1)/2)."""
    return a * (eps / eps_th) ** ((d + 1) / 2)


# ---------------------------------------------------------------------------
# Serialization

def trace_csv_text(result: ScheduleResult) -> str:
    lines = ["cycle,product,weight,magic_cell,cells"]
    for r in result.records:
        cells = "|".join(f"{x}:{y}" for x, y in r.cells)
        lines.append(f"{r.cycle},{r.seq},{r.weight},{r.magic_cell[0]}:{r.magic_cell[1]},{cells}")
    return "\n".join(lines) + "\n"


def metrics_dict(result: ScheduleResult) -> dict:
    return {
        "cycles": result.cycles,
        "layers": result.num_layers,
        "n_cells": result.n_cells,
        "n_ref_cells": result.n_ref_cells,
        "volume": result.volume,
        "parallel_efficiency": result.parallel_efficiency,
        "scheduling_efficiency": result.scheduling_efficiency,
        "cultivation": {
            "completed": result.cultivation_completed,
            "terminated": result.cultivation_terminated,
            "avg_completed_cycles": result.avg_completed_cultivation,
            "ready_used_for_routing": result.ready_used_for_routing,
        },
        "seed": result.seed,
        "config": result.config.echo(),
    }


def metrics_json_text(result: ScheduleResult) -> str:
    return json.dumps(metrics_dict(result), indent=1) + "\n"


def write_trace_csv(result: ScheduleResult, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trace_csv_text(result))


def write_metrics_json(result: ScheduleResult, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(metrics_json_text(result))


# ---------------------------------------------------------------------------
# Validity suite

def validate_schedule(result: ScheduleResult, graph: TaskGraph, layout: Layout,
                      config: SchedulerConfig | None = None) -> None:
    """Check structural schedule invariants; raise ValidationError on any.

    Covers conservation (every product exactly once), dependency order,
    per-cycle tree disjointness, mandatory-cell inclusion, tree
    connectivity, magic consumption (exactly one capable cell, inside
    the tree), ring-cell leaf discipline, and data-double exclusivity.
    """
    config = config or result.config
    problems: list[str] = []
    seen: dict[int, CommitRecord] = {}
    for r in result.records:
        if r.seq in seen:
            problems.append(f"product {r.seq} scheduled twice")
        seen[r.seq] = r
    if len(seen) != graph.num_products:
        problems.append(
            f"{len(seen)} of {graph.num_products} products scheduled")
    if result.records and max(r.cycle for r in result.records) != result.cycles:
        problems.append("last commit cycle != reported cycle count")

    for a, b in graph.edges:
        if a in seen and b in seen and seen[a].cycle >= seen[b].cycle:
            problems.append(
                f"dependency violated: {a}@{seen[a].cycle} -> {b}@{seen[b].cycle}")

    routable = layout.ancilla | layout.ring
    magic_capable = layout.ring if layout.arch is Arch.BUS else layout.ancilla
    by_cycle: dict[int, list[CommitRecord]] = {}
    for r in result.records:
        by_cycle.setdefault(r.cycle, []).append(r)

    for r in result.records:
        cells = set(r.cells)
        if r.weight != len(r.cells) or len(cells) != len(r.cells):
            problems.append(f"product {r.seq}: bad weight/duplicate cells")
        if not cells <= routable:
            problems.append(f"product {r.seq}: tree uses non-ancilla cells")
        if r.magic_cell not in cells or r.magic_cell not in magic_capable:
            problems.append(f"product {r.seq}: bad magic cell")
        ring_used = cells & layout.ring
        if (layout.arch is Arch.BUS and not config.bus_ring_intermediates
                and ring_used - {r.magic_cell}):
            problems.append(f"product {r.seq}: ring cells used as intermediates")
        mand = {
            c for s in access_options(
                layout, graph.products[r.seq],
                allow_horizontal_edges=config.allow_horizontal_edges,
                strict_single_side=config.strict_single_side)
            for c in s.cells
        }
        if not mand <= cells:
            problems.append(f"product {r.seq}: mandatory access cells missing")
        if not _connected(cells):
            problems.append(f"product {r.seq}: tree not connected")

    for cyc, recs in by_cycle.items():
        all_cells: set[Coord] = set()
        used_doubles: set[int] = set()
        for r in recs:
            cells = set(r.cells)
            if all_cells & cells:
                problems.append(f"cycle {cyc}: overlapping trees")
            all_cells |= cells
            touched = {q // 2 for q, _ in graph.products[r.seq].ops}
            if used_doubles & touched:
                problems.append(f"cycle {cyc}: double used by two products")
            used_doubles |= touched

    if problems:
        raise ValidationError("; ".join(problems[:20]))


def _connected(cells: set[Coord]) -> bool:
    if not cells:
        return False
    stack = [next(iter(cells))]
    seen = {stack[0]}
    while stack:
        x, y = stack.pop()
        for nb in ((x, y - 1), (x - 1, y), (x + 1, y), (x, y + 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)
