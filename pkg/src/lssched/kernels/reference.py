"""Pure-Python grid Steiner kernel (semantic reference).

Both kernel backends implement exactly this algorithm; the compiled one
must match it cell-for-cell, so every ordering rule is spelled out here:

* Grid cells are flat indices i = y * width + x.
* Tree growth follows the shortest-path heuristic: start from the
  lowest flat-index mandatory cell, then repeatedly attach the nearest
  unconnected target by a breadth-first search seeded from all current
  tree cells (in tree insertion order).
* Targets are unconnected mandatory cells, plus any ready cell while no
  magic state is attached yet (the magic state acts as one more
  terminal whose concrete cell is chosen by the search).
* Neighbor expansion order is up, left, right, down. Entering a cell
  costs 1, plus ready_penalty if it holds a ready state. The first
  target SETTLED (popped in cost order, FIFO within equal cost) wins.
* leaf_only cells (bus-ring magic) are never expanded and may only be
  entered as the final magic target.
* weight_cap prunes searches that provably cannot beat a known tree of
  weight cap+1. Cost-based pruning is only valid when ready_penalty is
  zero (cost equals cells added); a search abandoned by the cap reports
  PRUNED, which unlike NO_TREE says nothing about schedulability.
"""

from __future__ import annotations

BACKEND = "python"

FOUND = 0
NO_TREE = 1
PRUNED = 2


def find_tree(width, height, passable, ready, leaf_only, terminals,
              ready_penalty=0, weight_cap=0):
    """Grow one Steiner tree; returns (status, cells, magic_cell).

    cells is the tree in insertion order (flat indices) and magic_cell
    the consumed ready cell, or (status, None, -1) on failure.
    """
    passable = list(passable)
    ready = list(ready)
    leaf_only = list(leaf_only)
    if not any(ready):
        return (NO_TREE, None, -1)
    return _grow(width, height, passable, ready, leaf_only, list(terminals),
                 ready_penalty, weight_cap)


def _grow(width, height, passable, ready, leaf_only, terminals,
          ready_penalty, weight_cap):
    n = width * height
    term_flag = bytearray(n)  # 1 = unconnected mandatory, 2 = connected
    n_mand = 0
    for t in terminals:
        if not passable[t]:
            return (NO_TREE, None, -1)
        if not term_flag[t]:
            term_flag[t] = 1
            n_mand += 1

    start = min(terminals)
    in_tree = bytearray(n)
    tree = [start]
    in_tree[start] = 1
    term_flag[start] = 2
    mand_left = n_mand - 1
    magic = start if ready[start] else -1

    while mand_left > 0 or magic < 0:
        if weight_cap and len(tree) + 1 > weight_cap:
            return (PRUNED, None, -1)
        cap_cost = (weight_cap - len(tree)) if (weight_cap and ready_penalty == 0) else 0

        dist = [-1] * n
        parent = [-1] * n
        buckets = [list(tree)]
        pos = [0]
        for c in tree:
            dist[c] = 0
        found = -1
        truncated = False
        bi = 0
        while found < 0:
            while bi < len(buckets) and pos[bi] >= len(buckets[bi]):
                bi += 1
            if bi >= len(buckets):
                break
            u = buckets[bi][pos[bi]]
            pos[bi] += 1
            if not in_tree[u] and (term_flag[u] == 1 or (magic < 0 and ready[u])):
                found = u
                break
            if leaf_only[u]:
                continue
            du = dist[u]
            x = u % width
            for nb in (u - width if u >= width else -1,
                       u - 1 if x > 0 else -1,
                       u + 1 if x < width - 1 else -1,
                       u + width if u < n - width else -1):
                if nb < 0 or dist[nb] >= 0:
                    continue
                if not passable[nb] and not (magic < 0 and ready[nb]):
                    continue
                cost = du + 1 + (ready_penalty if ready[nb] else 0)
                if cap_cost and cost > cap_cost:
                    truncated = True
                    continue
                dist[nb] = cost
                parent[nb] = u
                while len(buckets) <= cost:
                    buckets.append([])
                    pos.append(0)
                buckets[cost].append(nb)

        if found < 0:
            return (PRUNED if truncated else NO_TREE, None, -1)
        path = []
        v = found
        while not in_tree[v]:
            path.append(v)
            v = parent[v]
        for c in reversed(path):
            tree.append(c)
            in_tree[c] = 1
            if term_flag[c] == 1:
                term_flag[c] = 2
                mand_left -= 1
            if magic < 0 and ready[c]:
                magic = c

    return (FOUND, tree, magic)


def best_fit(width, height, passable, ready, leaf_only,
             term_offsets, term_cells, order, ready_penalty=0):
    """One greedy pass: smallest tree among the candidates in `order`.

    Candidates are scanned in the given order (ascending product seq),
    so a strict weight comparison implements the lowest-seq tie-break.
    Returns (winner_pos, cells, magic_cell, hard_fail) where hard_fail
    lists positions whose products cannot be scheduled this cycle at
    all (their failure is monotone under further cell removal), unlike
    searches merely abandoned by the running-best weight cap.
    """
    passable = list(passable)
    ready = list(ready)
    leaf_only = list(leaf_only)
    order = list(order)
    if not any(ready):
        return (-1, None, -1, list(range(len(order))))

    hard_fail = []
    best_pos = -1
    best_cells = None
    best_magic = -1
    cap = 0
    for p, ci in enumerate(order):
        terms = list(term_cells[term_offsets[ci]:term_offsets[ci + 1]])
        status, cells, magic = _grow(width, height, passable, ready, leaf_only,
                                     terms, ready_penalty, cap)
        if status == NO_TREE:
            hard_fail.append(p)
        elif status == FOUND and (best_pos < 0 or len(cells) < len(best_cells)):
            best_pos, best_cells, best_magic = p, cells, magic
            if len(cells) == 1:
                break
            cap = len(cells) - 1
    return (best_pos, best_cells, best_magic, hard_fail)
