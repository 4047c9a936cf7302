# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid Steiner kernel.

Line-for-line port of kernels/reference.py (see its docstring for the
full semantics contract): same start cell, same bucket-FIFO settle
order, same neighbor order, same cap pruning. Any divergence between
the two backends is a bug; the equivalence is covered by tests.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "compiled"

FOUND = 0
NO_TREE = 1
PRUNED = 2

cdef int C_FOUND = 0
cdef int C_NO_TREE = 1
cdef int C_PRUNED = 2


cdef class _Workspace:
    """Reusable scratch arrays, epoch-stamped so resets are O(1)."""

    cdef cnp.int32_t[::1] dist
    cdef cnp.int32_t[::1] parent
    cdef cnp.int32_t[::1] stamp      # dist/parent valid iff stamp == epoch
    cdef cnp.int32_t[::1] bucket_head
    cdef cnp.int32_t[::1] bucket_tail
    cdef cnp.int32_t[::1] bucket_stamp
    cdef cnp.int32_t[::1] node_next
    cdef cnp.uint8_t[::1] term_flag
    cdef cnp.uint8_t[::1] in_tree
    cdef cnp.int32_t[::1] tree
    cdef cnp.int32_t[::1] touched    # cells whose term/in_tree flags were set
    cdef int n
    cdef int max_cost
    cdef int epoch

    def __cinit__(self, int n, int max_cost):
        self.n = n
        self.max_cost = max_cost
        self.dist = np.empty(n, dtype=np.int32)
        self.parent = np.empty(n, dtype=np.int32)
        self.stamp = np.zeros(n, dtype=np.int32)
        self.bucket_head = np.empty(max_cost + 2, dtype=np.int32)
        self.bucket_tail = np.empty(max_cost + 2, dtype=np.int32)
        self.bucket_stamp = np.zeros(max_cost + 2, dtype=np.int32)
        self.node_next = np.empty(n, dtype=np.int32)
        self.term_flag = np.zeros(n, dtype=np.uint8)
        self.in_tree = np.zeros(n, dtype=np.uint8)
        self.tree = np.empty(n, dtype=np.int32)
        self.touched = np.empty(2 * n, dtype=np.int32)
        self.epoch = 0


cdef _Workspace _ws = None


cdef _Workspace _workspace(int n, int max_cost):
    global _ws
    if _ws is None or _ws.n < n or _ws.max_cost < max_cost:
        _ws = _Workspace(n, max_cost)
    return _ws


cdef int _grow(_Workspace ws, int width, int height,
               const cnp.uint8_t[::1] passable, const cnp.uint8_t[::1] ready,
               const cnp.uint8_t[::1] leaf_only,
               const cnp.int32_t[:] terminals, int n_terms,
               int ready_penalty, int weight_cap,
               int* tree_len_out, int* magic_out) noexcept:
    """Returns status; on FOUND the tree is in ws.tree[:tree_len_out]."""
    cdef int n = width * height
    cdef int n_mand = 0, n_touched = 0
    cdef int i, t, start, magic, mand_left, tree_len
    cdef int bi, u, du, x, nb, cost, found, cap_cost, max_seen_cost
    cdef int truncated, path_len, v, j, status

    for i in range(n_terms):
        t = terminals[i]
        if not passable[t]:
            for j in range(n_touched):
                ws.term_flag[ws.touched[j]] = 0
            return C_NO_TREE
        if not ws.term_flag[t]:
            ws.term_flag[t] = 1
            ws.touched[n_touched] = t
            n_touched += 1
            n_mand += 1

    start = terminals[0]
    for i in range(1, n_terms):
        if terminals[i] < start:
            start = terminals[i]

    tree_len = 0
    ws.tree[tree_len] = start
    tree_len += 1
    ws.in_tree[start] = 1
    ws.term_flag[start] = 2
    mand_left = n_mand - 1
    magic = start if ready[start] else -1
    status = C_FOUND

    while mand_left > 0 or magic < 0:
        if weight_cap and tree_len + 1 > weight_cap:
            status = C_PRUNED
            break
        cap_cost = (weight_cap - tree_len) if (weight_cap and ready_penalty == 0) else 0

        # multi-source BFS seeded with the tree, FIFO per cost bucket
        ws.epoch += 1
        max_seen_cost = 0
        ws.bucket_stamp[0] = ws.epoch
        ws.bucket_head[0] = -1
        ws.bucket_tail[0] = -1
        for i in range(tree_len):
            u = ws.tree[i]
            ws.dist[u] = 0
            ws.stamp[u] = ws.epoch
            ws.node_next[u] = -1
            if ws.bucket_head[0] < 0:
                ws.bucket_head[0] = u
            else:
                ws.node_next[ws.bucket_tail[0]] = u
            ws.bucket_tail[0] = u
        found = -1
        truncated = 0
        bi = 0
        while found < 0:
            while bi <= max_seen_cost and (
                    ws.bucket_stamp[bi] != ws.epoch or ws.bucket_head[bi] < 0):
                bi += 1
            if bi > max_seen_cost:
                break
            u = ws.bucket_head[bi]
            ws.bucket_head[bi] = ws.node_next[u]
            if not ws.in_tree[u] and (
                    ws.term_flag[u] == 1 or (magic < 0 and ready[u])):
                found = u
                break
            if leaf_only[u]:
                continue
            du = ws.dist[u]
            x = u % width
            for j in range(4):
                if j == 0:
                    nb = u - width if u >= width else -1
                elif j == 1:
                    nb = u - 1 if x > 0 else -1
                elif j == 2:
                    nb = u + 1 if x < width - 1 else -1
                else:
                    nb = u + width if u < n - width else -1
                if nb < 0 or ws.stamp[nb] == ws.epoch:
                    continue
                if not passable[nb] and not (magic < 0 and ready[nb]):
                    continue
                cost = du + 1 + (ready_penalty if ready[nb] else 0)
                if cap_cost and cost > cap_cost:
                    truncated = 1
                    continue
                ws.dist[nb] = cost
                ws.parent[nb] = u
                ws.stamp[nb] = ws.epoch
                ws.node_next[nb] = -1
                if ws.bucket_stamp[cost] != ws.epoch or ws.bucket_head[cost] < 0:
                    ws.bucket_stamp[cost] = ws.epoch
                    ws.bucket_head[cost] = nb
                else:
                    ws.node_next[ws.bucket_tail[cost]] = nb
                ws.bucket_tail[cost] = nb
                if cost > max_seen_cost:
                    max_seen_cost = cost

        if found < 0:
            status = C_PRUNED if truncated else C_NO_TREE
            break

        # append the path tree-side first (reverse of the parent chain)
        path_len = 0
        v = found
        while not ws.in_tree[v]:
            path_len += 1
            v = ws.parent[v]
        v = found
        for i in range(path_len):
            ws.tree[tree_len + path_len - 1 - i] = v
            v = ws.parent[v]
        for i in range(path_len):
            v = ws.tree[tree_len]
            tree_len += 1
            ws.in_tree[v] = 1
            ws.touched[n_touched] = v
            n_touched += 1
            if ws.term_flag[v] == 1:
                ws.term_flag[v] = 2
                mand_left -= 1
            if magic < 0 and ready[v]:
                magic = v

    # reset flags touched by terminals and tree growth
    for i in range(tree_len):
        ws.in_tree[ws.tree[i]] = 0
    for i in range(n_touched):
        ws.term_flag[ws.touched[i]] = 0

    if status == C_FOUND:
        tree_len_out[0] = tree_len
        magic_out[0] = magic
    return status


cdef int _max_cost(int n, int ready_penalty):
    return n * (1 + ready_penalty) + 2


def find_tree(width, height, passable, ready, leaf_only, terminals,
              ready_penalty=0, weight_cap=0):
    """See kernels.reference.find_tree; identical contract and results."""
    cdef cnp.uint8_t[::1] pas = np.ascontiguousarray(passable, dtype=np.uint8)
    cdef cnp.uint8_t[::1] rdy = np.ascontiguousarray(ready, dtype=np.uint8)
    cdef cnp.uint8_t[::1] leaf = np.ascontiguousarray(leaf_only, dtype=np.uint8)
    cdef cnp.int32_t[:] terms = np.ascontiguousarray(terminals, dtype=np.int32)
    cdef int n = int(width) * int(height)
    cdef int i, any_ready = 0
    for i in range(n):
        if rdy[i]:
            any_ready = 1
            break
    if not any_ready:
        return (NO_TREE, None, -1)
    cdef _Workspace ws = _workspace(n, _max_cost(n, int(ready_penalty)))
    cdef int tree_len = 0, magic = -1
    cdef int status = _grow(ws, int(width), int(height), pas, rdy, leaf,
                            terms, terms.shape[0], int(ready_penalty),
                            int(weight_cap), &tree_len, &magic)
    if status != C_FOUND:
        return (status, None, -1)
    return (FOUND, [ws.tree[i] for i in range(tree_len)], magic)


def best_fit(width, height, passable, ready, leaf_only,
             term_offsets, term_cells, order, ready_penalty=0):
    """See kernels.reference.best_fit; identical contract and results."""
    cdef cnp.uint8_t[::1] pas = np.ascontiguousarray(passable, dtype=np.uint8)
    cdef cnp.uint8_t[::1] rdy = np.ascontiguousarray(ready, dtype=np.uint8)
    cdef cnp.uint8_t[::1] leaf = np.ascontiguousarray(leaf_only, dtype=np.uint8)
    cdef cnp.int32_t[::1] offs = np.ascontiguousarray(term_offsets, dtype=np.int32)
    cdef cnp.int32_t[::1] cells = np.ascontiguousarray(term_cells, dtype=np.int32)
    cdef cnp.int32_t[::1] scan = np.ascontiguousarray(order, dtype=np.int32)
    cdef int n = int(width) * int(height)
    cdef int w = int(width), h = int(height), penalty = int(ready_penalty)
    cdef int n_order = scan.shape[0]
    cdef int i, any_ready = 0
    hard_fail = []
    for i in range(n):
        if rdy[i]:
            any_ready = 1
            break
    if not any_ready:
        return (-1, None, -1, list(range(n_order)))

    cdef _Workspace ws = _workspace(n, _max_cost(n, penalty))
    cdef int best_pos = -1, best_len = 0, best_magic = -1, cap = 0
    cdef int p, ci, status, tree_len, magic
    best_cells = None
    for p in range(n_order):
        ci = scan[p]
        tree_len = 0
        magic = -1
        status = _grow(ws, w, h, pas, rdy, leaf,
                       cells[offs[ci]:offs[ci + 1]], offs[ci + 1] - offs[ci],
                       penalty, cap, &tree_len, &magic)
        if status == C_NO_TREE:
            hard_fail.append(p)
        elif status == C_FOUND and (best_pos < 0 or tree_len < best_len):
            best_pos = p
            best_len = tree_len
            best_magic = magic
            best_cells = [ws.tree[i] for i in range(tree_len)]
            if tree_len == 1:
                break
            cap = tree_len - 1
    return (best_pos, best_cells, best_magic, hard_fail)
