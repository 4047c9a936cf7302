"""Shared test oracles: dense unitaries and brute-force graph search.

Everything here is deliberately slow and simple; tests compare the
package's fast implementations against these.
"""

from __future__ import annotations

import itertools

import numpy as np

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)
_SDG = np.diag([1, -1j]).astype(complex)
_P0 = np.diag([1, 0]).astype(complex)
_P1 = np.diag([0, 1]).astype(complex)

PAULI_MATS = {"X": _X, "Y": _Y, "Z": _Z}
_ONE_QUBIT = {"h": _H, "s": _S, "sdg": _SDG, "x": _X, "y": _Y, "z": _Z}


def kron_at(factors: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Tensor product over n qubits; qubit 0 is the least significant bit."""
    out = np.array([[1.0 + 0j]])
    for q in range(n):
        out = np.kron(factors.get(q, _I), out)
    return out


def gate_matrix(kind: str, qubits: tuple[int, ...], n: int) -> np.ndarray:
    if kind in _ONE_QUBIT:
        return kron_at({qubits[0]: _ONE_QUBIT[kind]}, n)
    a, b = qubits
    tgt = _X if kind == "cx" else _Z
    return kron_at({a: _P0}, n) + kron_at({a: _P1, b: tgt}, n)


def circuit_unitary(gates, n: int) -> np.ndarray:
    """Operator product of a gate sequence (first gate acts first)."""
    u = np.eye(2**n, dtype=complex)
    for g in gates:
        u = gate_matrix(g.kind, g.qubits, n) @ u
    return u


def packed_pauli_matrix(p: tuple[int, int, int], n: int) -> np.ndarray:
    """Dense form of i^phase * X^xmask * Z^zmask."""
    x, z, phase = p
    factors = {}
    for q in range(n):
        m = _I
        if x >> q & 1:
            m = m @ _X
        if z >> q & 1:
            m = m @ _Z
        factors[q] = m
    return (1j**phase) * kron_at(factors, n)


def product_matrix(product, n: int) -> np.ndarray:
    return kron_at({q: PAULI_MATS[op] for q, op in product.ops}, n)


def grid_neighbors(i: int, width: int, n: int):
    x = i % width
    if i >= width:
        yield i - width
    if x > 0:
        yield i - 1
    if x < width - 1:
        yield i + 1
    if i + width < n:
        yield i + width


def cells_connected(cells: set[int], width: int, n: int) -> bool:
    if not cells:
        return False
    seen = {next(iter(cells))}
    stack = list(seen)
    while stack:
        u = stack.pop()
        for v in grid_neighbors(u, width, n):
            if v in cells and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == cells


def brute_force_steiner_weight(terminals: list[int], passable: list[int],
                               width: int, height: int) -> int | None:
    """Minimum connected cell set containing the terminals, by enumeration.

    Exponential in the free-cell count; keep grids tiny.
    """
    n = width * height
    terms = set(terminals)
    if any(not passable[t] for t in terms):
        return None
    optional = [i for i in range(n) if passable[i] and i not in terms]
    for extra in range(len(optional) + 1):
        for combo in itertools.combinations(optional, extra):
            cells = terms | set(combo)
            if cells_connected(cells, width, n):
                return len(cells)
    return None
