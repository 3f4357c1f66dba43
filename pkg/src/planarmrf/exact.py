"""Exact MAP inference by dynamic programming over a branch decomposition.

Tables live on the rooted decomposition's nodes and are indexed by
labelings of the node's boundary vertices, encoded as mixed-radix codes
with the smallest vertex id in the most significant digit. A node's
entry holds the best score achievable by the graph edges in its leaf
subtree, counting phi for every vertex those edges touch, with the
boundary labeling pinned. Merging two children double-counts phi
exactly on the intersection of their boundaries, so that sum is
subtracted once. The root's boundary is empty for a connected graph and
its single entry is the optimum.

Ties inside every max resolve to the lowest code, which makes the
returned assignment deterministic for a fixed decomposition, rooting,
and child order (and therefore identical across worker counts).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .branch import rooted_with_boundaries
from .errors import (
    DecompositionError,
    InputError,
    MemoryBudgetError,
    WidthCapError,
)
from .mrf import check_labels, evaluate

DEFAULT_WIDTH_CAP = 14
DEFAULT_BYTE_BUDGET = 1 << 30

# Index arrays below this many entries are memoized; the same handful of
# (L, place, total) shapes recurs at every merge of a decomposition.
_CACHE_ENTRY_LIMIT = 1 << 16


@lru_cache(maxsize=1024)
def _digits_cached(L, place, total):
    out = _digits_raw(L, place, total)
    out.flags.writeable = False
    return out


def _digits_raw(L, place, total):
    block = L**place
    return np.tile(np.repeat(np.arange(L, dtype=np.int64), block), total // (block * L))


def _digits(L, place, total):
    """Digit at `place` (units = L**place) of every code in range(total)."""
    if total > _CACHE_ENTRY_LIMIT:
        return _digits_raw(L, place, total)
    return _digits_cached(L, place, total)


def _gather_raw(L, total, places):
    idx = np.zeros(total, dtype=np.int64)
    for wgt, p in zip(_code_weights(len(places), L), places):
        idx += _digits(L, p, total) * wgt
    return idx


@lru_cache(maxsize=4096)
def _gather_cached(L, total, places):
    idx = _gather_raw(L, total, places)
    idx.flags.writeable = False
    return idx


def _gather_index(L, total, places):
    """Child-table index for every parent code, one entry per place tuple."""
    if total > _CACHE_ENTRY_LIMIT:
        return _gather_raw(L, total, places)
    return _gather_cached(L, total, places)


@lru_cache(maxsize=None)
def _code_weights(size, L):
    """Place values for a boundary tuple: first member most significant."""
    return tuple(L ** (size - 1 - i) for i in range(size))


def leaf_table(instance, edge_id, boundary, phi=None):
    """Table and backpointers for a single decomposition leaf.

    `boundary` is the sorted tuple of the edge's endpoints that touch
    other graph edges; the remaining endpoints are maximized out here
    and their chosen labels go into the returned choice array.
    """
    if phi is None:
        phi = instance.phi_mat
    psi = instance.psi_mat
    a, b = instance.graph.edges[edge_id]
    bset = set(boundary)
    if not bset <= {a, b}:
        raise DecompositionError(
            f"leaf boundary {boundary} is not a subset of the edge"
        )
    M = phi[a][:, None] + phi[b][None, :] + psi[edge_id]
    lo_first = M if a < b else M.T
    if len(boundary) == 2:
        values = lo_first.reshape(-1).copy()
        choices = np.zeros(values.size, dtype=np.int64)
    elif len(boundary) == 1:
        if boundary[0] == a:
            values = M.max(axis=1)
            choices = M.argmax(axis=1)
        else:
            values = M.max(axis=0)
            choices = M.argmax(axis=0)
    elif len(boundary) == 0:
        flat = lo_first.reshape(-1)
        best = int(np.argmax(flat))
        values = flat[best : best + 1].copy()
        choices = np.array([best], dtype=np.int64)
    return values, choices


def merge_children(left, right, d1, d2, dv, phi, L):
    """Combine two child tables into their parent's table.

    d1, d2, dv are the sorted boundary tuples of the children and the
    parent. Enumerates every labeling of U = d1 union d2 with the
    parent's boundary in the high digits, adds the child entries, and
    subtracts phi once for each vertex both children count. Returns the
    per-parent-code maxima and the chosen low-digit (tau) codes.
    """
    u_all = sorted(set(d1) | set(d2))
    free = [w for w in u_all if w not in set(dv)]
    ordered = list(dv) + free
    T = len(ordered)
    total = L**T
    place = {w: T - 1 - q for q, w in enumerate(ordered)}

    def child_index(d):
        return _gather_index(L, total, tuple(place[w] for w in d))

    combined = left[child_index(d1)]
    combined += right[child_index(d2)]
    inter = sorted(set(d1) & set(d2))
    for w in inter:
        combined -= phi[w][_digits(L, place[w], total)]
    S = L ** len(dv)
    grid = combined.reshape(S, total // S)
    values = grid.max(axis=1)
    choices = grid.argmax(axis=1)
    return values, choices


def _argmax_row(row):
    """(0-based label, value) with ties to the smallest label."""
    i = int(np.argmax(row))
    return i, float(row[i])


def _apply_fixed(instance, fixed):
    """Clamp phi rows so that any label other than the fixed one loses.

    The sentinel is below minus the instance's total score mass, so a
    single clamped mismatch drags any assignment under every legitimate
    one and the max never picks it (a consistent assignment always
    exists). Returned scores are unaffected because the fixed labels
    score their original phi.
    """
    phi = instance.phi_mat.copy()
    bound = float(np.abs(phi).sum())
    if instance.graph.num_edges:
        bound += float(np.abs(instance.psi_mat).sum())
    sentinel = -(2.0 * bound + 1.0)
    L = instance.num_labels
    for v, lab in fixed.items():
        if not 0 <= v < instance.graph.num_vertices:
            raise InputError(f"fixed vertex {v} out of range")
        if not 1 <= lab <= L:
            raise InputError(f"fixed label {lab} for vertex {v} outside 1..{L}")
        keep = phi[v, lab - 1]
        phi[v, :] = sentinel
        phi[v, lab - 1] = keep
    return phi


def solve_exact(
    instance,
    decomp,
    width_cap=DEFAULT_WIDTH_CAP,
    tree_edge=None,
    fixed=None,
    byte_budget=DEFAULT_BYTE_BUDGET,
):
    """Maximize a connected instance exactly over a branch decomposition.

    Returns (labels, score) with 1-based labels. Graphs with at most
    one edge are enumerated directly and ignore `decomp`. `fixed` maps
    vertex ids to required labels (used for boundary seeding). A
    boundary larger than `width_cap`, a merge wider than twice it, or a
    table over `byte_budget` bytes raises instead of thrashing.
    """
    g = instance.graph
    n = g.num_vertices
    m = g.num_edges
    L = instance.num_labels
    phi = instance.phi_mat if not fixed else _apply_fixed(instance, fixed)

    if m == 0:
        if n != 1:
            raise InputError("edgeless instance with more than one vertex is disconnected")
        lab, _ = _argmax_row(phi[0])
        labels = np.array([lab + 1], dtype=np.int64)
        return labels, float(instance.phi_mat[0, lab])
    if m == 1:
        a, b = g.edges[0]
        M = phi[a][:, None] + phi[b][None, :] + instance.psi_mat[0]
        flat = (M if a < b else M.T).reshape(-1)
        best = int(np.argmax(flat))
        lo, hi = (a, b) if a < b else (b, a)
        out = np.zeros(n, dtype=np.int64)
        out[lo] = best // L + 1
        out[hi] = best % L + 1
        return out, evaluate(instance, out)

    leaf_edges = [e for e in decomp.leaf_edge if e >= 0]
    if sorted(leaf_edges) != list(range(m)):
        raise DecompositionError("decomposition leaves do not match the edge list")

    rooted, bsets = rooted_with_boundaries(decomp, g, tree_edge)
    widest = max(len(b) for b in bsets)
    if widest > width_cap:
        raise WidthCapError(
            f"boundary of {widest} vertices exceeds width cap {width_cap}",
            width=widest,
            cap=width_cap,
        )
    if bsets[rooted.root]:
        raise DecompositionError("root boundary is not empty; graph or tree mismatch")

    nn = rooted.num_nodes
    values = [None] * nn
    choices = [None] * nn
    for node in rooted.order:
        kids = rooted.children[node]
        if not kids:
            values[node], choices[node] = leaf_table(
                instance, rooted.leaf_edge[node], bsets[node], phi=phi
            )
            continue
        c1, c2 = kids
        u_size = len(set(bsets[c1]) | set(bsets[c2]))
        if u_size > 2 * width_cap:
            raise WidthCapError(
                f"merge over {u_size} vertices exceeds twice the width cap",
                width=u_size,
                cap=width_cap,
            )
        table_bytes = 8 * (L**u_size)
        if table_bytes > byte_budget:
            raise MemoryBudgetError(
                f"merge table needs {table_bytes} bytes, budget is {byte_budget}"
            )
        values[node], choices[node] = merge_children(
            values[c1], values[c2], bsets[c1], bsets[c2], bsets[node], phi, L
        )
        values[c1] = None
        values[c2] = None

    score = float(values[rooted.root][0])

    labels = np.zeros(n, dtype=np.int64)
    stack = [(rooted.root, 0)]
    while stack:
        node, sigma = stack.pop()
        dv = bsets[node]
        kids = rooted.children[node]
        digs = {}
        for wgt, w in zip(_code_weights(len(dv), L), dv):
            digs[w] = (sigma // wgt) % L
        if not kids:
            a, b = g.edges[rooted.leaf_edge[node]]
            free = sorted({a, b} - set(dv))
            tau = int(choices[node][sigma])
            for wgt, w in zip(_code_weights(len(free), L), free):
                labels[w] = (tau // wgt) % L + 1
            continue
        c1, c2 = kids
        u_all = sorted(set(bsets[c1]) | set(bsets[c2]))
        free = [w for w in u_all if w not in digs]
        tau = int(choices[node][sigma])
        for wgt, w in zip(_code_weights(len(free), L), free):
            digs[w] = (tau // wgt) % L
            labels[w] = digs[w] + 1
        for child in (c1, c2):
            code = 0
            for wgt, w in zip(_code_weights(len(bsets[child]), L), bsets[child]):
                code += digs[w] * wgt
            stack.append((child, code))

    check_labels(instance, labels)
    if fixed:
        score = evaluate(instance, labels)
    return labels, score
