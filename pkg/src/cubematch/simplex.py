"""Primal network simplex for uncapacitated min-cost flow with integer data.

The solver keeps a strongly feasible spanning tree rooted at an artificial
node, prices arcs by block search, and selects the leaving arc with
Cunningham's last-blocking-arc rule, which rules out cycling on degenerate
pivots. Node potentials satisfy p[i] - p[j] <= cost for every arc i -> j at
optimality, with equality on basic arcs.

`_solve` is plain Python over numpy arrays. It is compiled with numba for
int64 supplies; supplies that might overflow int64 run the same code
uncompiled on Python integers (object arrays).
"""

from __future__ import annotations

import numpy as np

from .errors import ResourceError

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

INT64_SAFE = 1 << 62


def _solve(n_nodes, src, dst, cost, supply, flow, pot, max_pivots):
    m = src.shape[0]
    root = n_nodes
    nn = n_nodes + 1
    big = 1
    for k in range(m):
        if cost[k] > big:
            big = cost[k]
    big = big * nn + 1

    parent = np.empty(nn, np.int64)
    pred = np.empty(nn, np.int64)
    art_out = np.empty(nn, np.bool_)  # artificial arc points node -> root
    art_flow = supply[:nn].copy()  # flows of artificial arcs (same dtype as supply)
    depth = np.empty(nn, np.int64)
    first = np.full(nn, -1, np.int64)
    nxt = np.full(nn, -1, np.int64)
    prv = np.full(nn, -1, np.int64)
    stack = np.empty(nn, np.int64)

    # tree arcs are encoded as k >= 0 for real arcs and -1 - i for node i's artificial arc
    for i in range(n_nodes):
        parent[i] = root
        pred[i] = -1 - i
        depth[i] = 1
        if supply[i] > 0:
            art_out[i] = True
            art_flow[i] = supply[i]
            pot[i] = big
        else:
            art_out[i] = False
            art_flow[i] = -supply[i]
            pot[i] = -big
        nxt[i] = first[root]
        if first[root] != -1:
            prv[first[root]] = i
        first[root] = i
    parent[root] = -1
    pred[root] = -1
    depth[root] = 0
    pot[root] = 0

    block = max(10, int(np.sqrt(m)))
    next_arc = 0
    pivots = 0
    while pivots < max_pivots:
        # block-search pricing
        best = 0
        e = -1
        cnt = 0
        scanned = 0
        k = next_arc
        while scanned < m:
            rc = cost[k] - pot[src[k]] + pot[dst[k]]
            if rc < best:
                best = rc
                e = k
            k += 1
            if k == m:
                k = 0
            scanned += 1
            cnt += 1
            if cnt == block:
                if e >= 0:
                    break
                cnt = 0
        next_arc = k
        if e < 0:
            return pivots
        pivots += 1

        u = src[e]
        v = dst[e]
        a = u
        b = v
        while a != b:
            if depth[a] > depth[b]:
                a = parent[a]
            elif depth[b] > depth[a]:
                b = parent[b]
            else:
                a = parent[a]
                b = parent[b]
        join = a

        # u side: traversed join -> u, arcs pointing w -> parent block
        theta_u = -1
        leave_u = -1
        w = u
        while w != join:
            t = pred[w]
            if t >= 0:
                up = src[t] == w
                amount = flow[t]
            else:
                up = art_out[-1 - t]
                amount = art_flow[-1 - t]
            if up and (leave_u < 0 or amount < theta_u):
                theta_u = amount
                leave_u = w
            w = parent[w]
        # v side: traversed v -> join, arcs pointing parent -> w block
        theta_v = -1
        leave_v = -1
        w = v
        while w != join:
            t = pred[w]
            if t >= 0:
                down = dst[t] == w
                amount = flow[t]
            else:
                down = not art_out[-1 - t]
                amount = art_flow[-1 - t]
            if down and (leave_v < 0 or amount <= theta_v):
                theta_v = amount
                leave_v = w
            w = parent[w]

        if leave_v >= 0 and (leave_u < 0 or theta_v <= theta_u):
            theta = theta_v
            q = leave_v
            new_child = v
            new_parent = u
            shift = -best
        else:
            theta = theta_u
            q = leave_u
            new_child = u
            new_parent = v
            shift = best

        if theta > 0:
            flow[e] += theta
            w = u
            while w != join:
                t = pred[w]
                if t >= 0:
                    if src[t] == w:
                        flow[t] -= theta
                    else:
                        flow[t] += theta
                elif art_out[-1 - t]:
                    art_flow[-1 - t] -= theta
                else:
                    art_flow[-1 - t] += theta
                w = parent[w]
            w = v
            while w != join:
                t = pred[w]
                if t >= 0:
                    if src[t] == w:
                        flow[t] += theta
                    else:
                        flow[t] -= theta
                elif art_out[-1 - t]:
                    art_flow[-1 - t] += theta
                else:
                    art_flow[-1 - t] -= theta
                w = parent[w]

        # re-hang the subtree below q from new_child via the entering arc
        prev_node = new_parent
        prev_arc = e
        w = new_child
        while True:
            old_parent = parent[w]
            old_arc = pred[w]
            if prv[w] != -1:
                nxt[prv[w]] = nxt[w]
            else:
                first[old_parent] = nxt[w]
            if nxt[w] != -1:
                prv[nxt[w]] = prv[w]
            parent[w] = prev_node
            pred[w] = prev_arc
            prv[w] = -1
            nxt[w] = first[prev_node]
            if first[prev_node] != -1:
                prv[first[prev_node]] = w
            first[prev_node] = w
            if w == q:
                break
            prev_node = w
            prev_arc = old_arc
            w = old_parent

        top = 0
        stack[0] = new_child
        while top >= 0:
            w = stack[top]
            top -= 1
            depth[w] = depth[parent[w]] + 1
            pot[w] += shift
            c = first[w]
            while c != -1:
                top += 1
                stack[top] = c
                c = nxt[c]
    return -1


def _decompose(n_nodes, src, dst, flow, excess, out_src, out_dst, out_amt, adj_start, adj_arc):
    """Split an acyclic flow into source -> sink path amounts; returns entry count."""
    count = 0
    path = np.empty(n_nodes + 1, np.int64)
    for s in range(n_nodes):
        while excess[s] > 0:
            w = s
            plen = 0
            amt = excess[s]
            while w == s or excess[w] >= 0:
                found = -1
                for j in range(adj_start[w], adj_start[w + 1]):
                    if flow[adj_arc[j]] > 0:
                        found = adj_arc[j]
                        break
                if found < 0:
                    return -1
                path[plen] = found
                plen += 1
                if flow[found] < amt:
                    amt = flow[found]
                w = dst[found]
            if -excess[w] < amt:
                amt = -excess[w]
            for j in range(plen):
                flow[path[j]] -= amt
            excess[s] -= amt
            excess[w] += amt
            out_src[count] = s
            out_dst[count] = w
            out_amt[count] = amt
            count += 1
    return count


if numba is not None:
    _solve_jit = numba.njit(cache=True, nogil=True)(_solve)
    _decompose_jit = numba.njit(cache=True, nogil=True)(_decompose)
else:  # pragma: no cover
    _solve_jit = _solve
    _decompose_jit = _decompose


def _use_jit(supply) -> bool:
    return supply.dtype == np.int64 and numba is not None


def to_supply_array(values) -> np.ndarray:
    """int64 array when every partial sum is safe, else an object array of ints."""
    vals = [int(x) for x in values]
    total = sum(abs(x) for x in vals)
    if total < INT64_SAFE:
        return np.array(vals, dtype=np.int64)
    arr = np.empty(len(vals), dtype=object)
    arr[:] = vals
    return arr


def min_cost_flow(n_nodes: int, src, dst, cost, supply, max_pivots: int | None = None):
    """Solve min sum cost*flow s.t. out - in = supply at every node, flow >= 0.

    Returns (flow, potentials) with flow in the dtype of `supply` and
    integer potentials (length n_nodes). Requires sum(supply) == 0.
    """
    src = np.ascontiguousarray(src, dtype=np.int64)
    dst = np.ascontiguousarray(dst, dtype=np.int64)
    cost = np.ascontiguousarray(cost, dtype=np.int64)
    if sum(supply.tolist()) != 0:
        raise ValueError("supplies must balance")
    if np.any(cost < 0):
        raise ValueError("arc costs must be nonnegative")
    padded = np.concatenate([supply, np.zeros(1, dtype=supply.dtype)])
    flow = np.zeros(src.size, dtype=supply.dtype)
    pot = np.zeros(n_nodes + 1, dtype=np.int64)
    if max_pivots is None:
        max_pivots = 50 * (src.size + n_nodes) + 1000
    solver = _solve_jit if _use_jit(supply) else _solve
    pivots = solver(n_nodes, src, dst, cost, padded, flow, pot, max_pivots)
    if pivots < 0:
        raise ResourceError(f"network simplex hit its pivot limit ({max_pivots})")
    return flow, pot[:n_nodes]


def decompose_paths(n_nodes: int, src, dst, flow, supply):
    """Path decomposition of an acyclic flow into (source, sink, amount) triples."""
    order = np.argsort(src, kind="stable")
    adj_arc = order.astype(np.int64)
    adj_start = np.searchsorted(src[order], np.arange(n_nodes + 1)).astype(np.int64)
    cap = int(np.count_nonzero(flow)) + n_nodes + 1
    out_src = np.empty(cap, np.int64)
    out_dst = np.empty(cap, np.int64)
    out_amt = np.zeros(cap, dtype=flow.dtype)
    if not _use_jit(flow):
        out_amt = np.empty(cap, dtype=object)
    f = flow.copy()
    ex = supply.copy()
    fn = _decompose_jit if _use_jit(flow) else _decompose
    count = fn(n_nodes, np.asarray(src, np.int64), np.asarray(dst, np.int64), f, ex,
               out_src, out_dst, out_amt, adj_start, adj_arc)
    if count < 0:
        raise RuntimeError("flow is not conservative")
    return out_src[:count], out_dst[:count], out_amt[:count]
