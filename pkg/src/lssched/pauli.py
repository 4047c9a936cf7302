"""Pauli products, circuits, and the qubit-sharing dependency graph.

A circuit here is an ordered list of multi-qubit pi/8 rotations, each
described by its Pauli axis (e.g. "X0 Z3"). Two products that touch any
common qubit must run in order; the resulting DAG's longest-path depth
("layers") is the cycle lower bound under full parallelism.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InputError, ParseError

PAULI_OPS = ("X", "Y", "Z")


@dataclass(frozen=True)
class PauliProduct:
    """One pi/8 rotation axis: sorted (qubit, op) pairs plus its circuit position."""

    ops: tuple[tuple[int, str], ...]
    seq: int = 0

    def __post_init__(self):
        if not self.ops:
            raise InputError("empty Pauli product")
        prev = -1
        for q, op in self.ops:
            if q <= prev:
                raise InputError(f"qubit indices must be strictly increasing, got {self.ops}")
            if op not in PAULI_OPS:
                raise InputError(f"bad Pauli operator {op!r}")
            prev = q

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.ops)

    @property
    def size(self) -> int:
        return len(self.ops)

    def __str__(self) -> str:
        return " ".join(f"{op}{q}" for q, op in self.ops)


def parse_product(text: str, seq: int = 0) -> PauliProduct:
    """Parse a token string like "X0 Y4 Z6" (any token order, no duplicates)."""
    ops = {}
    for tok in text.split():
        op, digits = tok[:1], tok[1:]
        if op not in PAULI_OPS or not digits.isdigit():
            raise ParseError(f"bad product token {tok!r}")
        q = int(digits)
        if q in ops:
            raise ParseError(f"duplicate qubit {q} in product {text!r}")
        ops[q] = op
    if not ops:
        raise ParseError(f"empty product string {text!r}")
    return PauliProduct(tuple(sorted(ops.items())), seq)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    products: tuple[PauliProduct, ...]

    def __post_init__(self):
        if self.num_qubits < 1:
            raise InputError("circuit needs at least one qubit")
        for i, p in enumerate(self.products):
            if p.seq != i:
                raise InputError(f"product {i} has seq {p.seq}")
            if p.ops[-1][0] >= self.num_qubits:
                raise InputError(
                    f"product {i} ({p}) uses qubit {p.ops[-1][0]} "
                    f"but circuit has {self.num_qubits} qubits"
                )


def circuit_from_strings(num_qubits: int, products: list[str]) -> Circuit:
    return Circuit(num_qubits, tuple(parse_product(s, i) for i, s in enumerate(products)))


# ---------------------------------------------------------------------------
# Task graph

@dataclass(frozen=True)
class TaskGraph:
    """Dependency DAG over the products, with longest-path layers."""

    products: tuple[PauliProduct, ...]
    edges: tuple[tuple[int, int], ...]
    layer: tuple[int, ...]
    preds: tuple[tuple[int, ...], ...] = field(repr=False)
    succs: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def num_products(self) -> int:
        return len(self.products)

    @property
    def num_layers(self) -> int:
        return (max(self.layer) + 1) if self.layer else 0

    def layer_populations(self) -> list[int]:
        pop = [0] * self.num_layers
        for d in self.layer:
            pop[d] += 1
        return pop


def build_task_graph(circuit: Circuit) -> TaskGraph:
    """Order products that share any qubit (per-qubit last writer, deduplicated)."""
    n = len(circuit.products)
    preds: list[set[int]] = [set() for _ in range(n)]
    last_writer: dict[int, int] = {}
    for i, p in enumerate(circuit.products):
        for q, _ in p.ops:
            j = last_writer.get(q)
            if j is not None:
                preds[i].add(j)
            last_writer[q] = i
    layer = [0] * n
    succs: list[list[int]] = [[] for _ in range(n)]
    edges = []
    for i in range(n):  # preds have lower seq, so one forward pass suffices
        for j in sorted(preds[i]):
            edges.append((j, i))
            succs[j].append(i)
            if layer[j] + 1 > layer[i]:
                layer[i] = layer[j] + 1
    return TaskGraph(
        products=circuit.products,
        edges=tuple(edges),
        layer=tuple(layer),
        preds=tuple(tuple(sorted(s)) for s in preds),
        succs=tuple(tuple(s) for s in succs),
    )


def parallelism_stats(graph: TaskGraph) -> dict:
    """Layer statistics: products per layer and the total rotation count."""
    if graph.num_products == 0:
        return {"num_layers": 0, "avg_products_per_layer": 0.0,
                "max_products_per_layer": 0, "t_count": 0}
    pop = graph.layer_populations()
    return {
        "num_layers": len(pop),
        "avg_products_per_layer": graph.num_products / len(pop),
        "max_products_per_layer": max(pop),
        "t_count": graph.num_products,
    }


def moving_window_stats(graph: TaskGraph, window: int) -> list[dict]:
    """Per-window layer stats (stride = window), as plotted time series.

    Returns one record per window of consecutive layers, covering products
    per layer and product sizes. A window wider than the whole graph
    degenerates to a single record.
    """
    if window < 1:
        raise InputError("window must be >= 1")
    nl = graph.num_layers
    if nl == 0:
        return []
    pop = graph.layer_populations()
    sizes: list[list[int]] = [[] for _ in range(nl)]
    for p in graph.products:
        sizes[graph.layer[p.seq]].append(p.size)
    records = []
    for start in range(0, nl, window):
        stop = min(start + window, nl)
        wpop = pop[start:stop]
        wsizes = [s for layer in sizes[start:stop] for s in layer]
        records.append({
            "layer_index": start,
            "avg_products": sum(wpop) / len(wpop),
            "max_products": max(wpop),
            "avg_size": (sum(wsizes) / len(wsizes)) if wsizes else 0.0,
            "max_size": max(wsizes) if wsizes else 0,
        })
    return records


# ---------------------------------------------------------------------------
# Product file I/O

FILE_VERSION = 1
_ALLOWED_KEYS = {"version", "num_qubits", "products"}


def circuit_to_json(circuit: Circuit) -> str:
    doc = {
        "version": FILE_VERSION,
        "num_qubits": circuit.num_qubits,
        "products": [str(p) for p in circuit.products],
    }
    return json.dumps(doc, indent=1) + "\n"


def circuit_from_json(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("product file must be a JSON object")
    unknown = set(doc) - _ALLOWED_KEYS
    if unknown:
        raise ParseError(f"unknown fields in product file: {sorted(unknown)}")
    for key in _ALLOWED_KEYS:
        if key not in doc:
            raise ParseError(f"product file missing field {key!r}")
    if doc["version"] != FILE_VERSION:
        raise ParseError(f"unsupported product file version {doc['version']!r}")
    if not isinstance(doc["num_qubits"], int) or not isinstance(doc["products"], list):
        raise ParseError("bad field types in product file")
    return circuit_from_strings(doc["num_qubits"], doc["products"])


def load_circuit(path: str) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return circuit_from_json(fh.read())


def save_circuit(circuit: Circuit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(circuit_to_json(circuit))
