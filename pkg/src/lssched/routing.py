"""Steiner-tree search over per-cycle routing graphs.

Thin coordinate-level layer over the grid kernel, plus an exact
dynamic-programming solver used as a test oracle for the 2 - 2/S
approximation bound. Tree weight counts cells (the consumed magic cell
included), not edges; for trees cells = edges + 1, so minimizing one
minimizes the other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernels

Coord = tuple[int, int]


@dataclass(frozen=True)
class RoutingGraph:
    """Snapshot of routable cells: unit-cost 4-adjacency over free cells."""

    width: int
    height: int
    passable: np.ndarray = field(repr=False)  # uint8, flat
    leaf_only: np.ndarray = field(repr=False)  # uint8, flat
    penalty: int = 0

    @classmethod
    def from_cells(cls, width: int, height: int, free: Iterable[Coord],
                   leaf_only: Iterable[Coord] = (), penalty: int = 0) -> "RoutingGraph":
        passable = np.zeros(width * height, dtype=np.uint8)
        for x, y in free:
            passable[y * width + x] = 1
        leaf = np.zeros(width * height, dtype=np.uint8)
        for x, y in leaf_only:
            leaf[y * width + x] = 1
        return cls(width, height, passable, leaf, penalty)

    def flat(self, c: Coord) -> int:
        return c[1] * self.width + c[0]

    def coord(self, i: int) -> Coord:
        return (i % self.width, i // self.width)


@dataclass(frozen=True)
class SteinerTree:
    cells: tuple[Coord, ...]  # sorted by (x, y)
    magic_cell: Coord | None
    weight: int


def find_steiner_tree(access: Iterable[Iterable[Coord]], ready_cells: Iterable[Coord],
                      graph: RoutingGraph) -> SteinerTree | None:
    """Shortest-path-heuristic tree joining all access cells to a magic state.

    access holds the mandatory-cell groups (one per touched double);
    ready_cells the currently ready magic cells. Returns None when no
    tree exists (mandatory cell blocked, magic starved, or disconnected).
    """
    terminals = sorted({graph.flat(c) for group in access for c in group})
    if not terminals:
        raise ValueError("no mandatory cells given")
    ready = np.zeros(graph.width * graph.height, dtype=np.uint8)
    for c in ready_cells:
        ready[graph.flat(c)] = 1
    status, cells, magic = kernels.find_tree(
        graph.width, graph.height, graph.passable, ready, graph.leaf_only,
        terminals, graph.penalty, 0)
    if status != kernels.FOUND:
        return None
    return SteinerTree(
        cells=tuple(sorted(graph.coord(c) for c in cells)),
        magic_cell=graph.coord(magic),
        weight=len(cells),
    )


# ---------------------------------------------------------------------------
# Exact oracle (Dreyfus-Wagner dynamic program, small instances only)

_MAX_VERTICES = 30
_MAX_TERMINALS = 4
_INF = 1 << 30


def optimal_steiner_tree(terminals: Iterable[Coord], graph: RoutingGraph) -> SteinerTree | None:
    """Exact minimum Steiner tree by DP over terminal subsets.

    Intended as a test oracle; refuses instances beyond 30 passable
    vertices or 4 terminals. Returns None when terminals cannot be
    connected. magic_cell is None (the oracle knows nothing of magic).
    """
    verts = [i for i in range(graph.width * graph.height) if graph.passable[i]]
    if len(verts) > _MAX_VERTICES:
        raise ValueError(f"oracle limited to {_MAX_VERTICES} vertices, got {len(verts)}")
    terms = sorted({graph.flat(c) for c in terminals})
    if len(terms) > _MAX_TERMINALS:
        raise ValueError(f"oracle limited to {_MAX_TERMINALS} terminals")
    if not terms:
        raise ValueError("no terminals")
    vid = {v: i for i, v in enumerate(verts)}
    if any(t not in vid for t in terms):
        return None
    nv = len(verts)
    dist = [_bfs_dists(graph, v, vid) for v in verts]
    k = len(terms)
    tidx = [vid[t] for t in terms]
    if any(dist[tidx[0]][t] >= _INF for t in tidx):
        return None

    full = (1 << k) - 1
    dp = [[_INF] * nv for _ in range(full + 1)]
    choice: list[list[tuple | None]] = [[None] * nv for _ in range(full + 1)]
    for i, t in enumerate(tidx):
        for v in range(nv):
            dp[1 << i][v] = dist[t][v]
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        base = [_INF] * nv
        base_choice: list[tuple | None] = [None] * nv
        sub = (mask - 1) & mask
        while sub:
            rest = mask ^ sub
            if sub > rest:  # each split once
                for u in range(nv):
                    cost = dp[sub][u] + dp[rest][u]
                    if cost < base[u]:
                        base[u] = cost
                        base_choice[u] = (sub, rest)
            sub = (sub - 1) & mask
        for v in range(nv):
            for u in range(nv):
                cost = base[u] + dist[u][v]
                if cost < dp[mask][v]:
                    dp[mask][v] = cost
                    choice[mask][v] = (u, *base_choice[u])

    root = min(range(nv), key=lambda v: dp[full][v])
    if dp[full][root] >= _INF:
        return None

    cells: set[int] = set()

    def rebuild(mask: int, v: int) -> None:
        if mask & (mask - 1) == 0:
            t = tidx[mask.bit_length() - 1]
            cells.update(_bfs_path(graph, verts[t], verts[v], vid))
            return
        u, sub, rest = choice[mask][v]
        cells.update(_bfs_path(graph, verts[u], verts[v], vid))
        rebuild(sub, u)
        rebuild(rest, u)

    rebuild(full, root)
    return SteinerTree(
        cells=tuple(sorted(graph.coord(c) for c in cells)),
        magic_cell=None,
        weight=len(cells),
    )


def _neighbors(graph: RoutingGraph, v: int):
    x = v % graph.width
    if v >= graph.width:
        yield v - graph.width
    if x > 0:
        yield v - 1
    if x < graph.width - 1:
        yield v + 1
    if v < graph.width * (graph.height - 1):
        yield v + graph.width


def _bfs_dists(graph: RoutingGraph, src: int, vid: dict[int, int]) -> list[int]:
    dist = [_INF] * len(vid)
    dist[vid[src]] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for nb in _neighbors(graph, u):
            if nb in vid and dist[vid[nb]] >= _INF:
                dist[vid[nb]] = dist[vid[u]] + 1
                queue.append(nb)
    return dist


def _bfs_path(graph: RoutingGraph, src: int, dst: int, vid: dict[int, int]) -> list[int]:
    parent = {src: -1}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        for nb in _neighbors(graph, u):
            if nb in vid and nb not in parent:
                parent[nb] = u
                queue.append(nb)
    path = [dst]
    while parent[path[-1]] >= 0:
        path.append(parent[path[-1]])
    return path
