"""Pairwise MRF instances and the operations every solver builds on.

An instance assigns each vertex v a score row phi[v] of length L and
each edge e=(u, v) an L x L table psi[e] whose first index is the label
of u (the edge's stored first endpoint). Labels are 1-based everywhere
in the public API; the objective for a label vector x is

    sum_v phi[v][x_v] + sum_(u,v) psi[(u,v)][x_u, x_v]

and solvers maximize it.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidAssignmentError, InvalidInstanceError, TooLargeError
from .graph import Graph, grid_graph

# Enumeration cap for brute_force_solve: L**n may not exceed this.
BRUTE_FORCE_CAP = 2**24
_CHUNK = 1 << 15


class MRFInstance:
    """Container for (graph, num_labels, phi, psi).

    phi and psi are stored as given so that validate() can inspect
    malformed inputs; the `phi_mat` / `psi_mat` properties coerce to
    contiguous float64 arrays of shape (n, L) and (m, L, L) and are what
    the numeric code paths use.
    """

    def __init__(self, graph, num_labels, phi, psi):
        self.graph = graph
        self.num_labels = int(num_labels)
        self.phi = phi
        self.psi = psi
        self._phi_mat = None
        self._psi_mat = None

    @property
    def phi_mat(self):
        if self._phi_mat is None:
            try:
                mat = np.asarray(self.phi, dtype=np.float64)
            except (TypeError, ValueError) as exc:
                raise InvalidInstanceError(f"phi is not rectangular: {exc}")
            if mat.shape != (self.graph.num_vertices, self.num_labels):
                raise InvalidInstanceError(
                    f"phi has shape {mat.shape}, expected "
                    f"({self.graph.num_vertices}, {self.num_labels})"
                )
            self._phi_mat = np.ascontiguousarray(mat)
        return self._phi_mat

    @property
    def psi_mat(self):
        if self._psi_mat is None:
            L = self.num_labels
            m = self.graph.num_edges
            try:
                mat = np.asarray(self.psi, dtype=np.float64)
            except (TypeError, ValueError) as exc:
                raise InvalidInstanceError(f"psi is not rectangular: {exc}")
            if mat.shape == (m, L, L):
                pass
            elif mat.shape == (m, L * L):
                mat = mat.reshape(m, L, L)
            else:
                raise InvalidInstanceError(
                    f"psi has shape {mat.shape}, expected ({m}, {L}, {L})"
                )
            self._psi_mat = np.ascontiguousarray(mat)
        return self._psi_mat

    def __repr__(self):
        return (
            f"MRFInstance(n={self.graph.num_vertices}, "
            f"m={self.graph.num_edges}, L={self.num_labels})"
        )


def check_labels(instance, labels):
    """Coerce `labels` to an int64 array and verify range and length."""
    arr = np.asarray(labels)
    n = instance.graph.num_vertices
    if arr.shape != (n,):
        raise InvalidAssignmentError(
            f"assignment has shape {arr.shape}, expected ({n},)"
        )
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == arr.astype(np.int64)):
            raise InvalidAssignmentError("assignment labels must be integers")
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 1 or arr.max() > instance.num_labels):
        bad = int(np.flatnonzero((arr < 1) | (arr > instance.num_labels))[0])
        raise InvalidAssignmentError(
            f"label {int(arr[bad])} at vertex {bad} outside 1..{instance.num_labels}"
        )
    return arr


def evaluate(instance, labels):
    """Objective value of a 1-based label vector.

    Summation is a fixed deterministic order (vertex terms then edge
    terms, each reduced by numpy's pairwise sum), so repeated calls on
    identical inputs agree bit-for-bit.
    """
    x = check_labels(instance, labels) - 1
    phi = instance.phi_mat
    total = float(np.sum(phi[np.arange(phi.shape[0]), x]))
    if instance.graph.num_edges:
        psi = instance.psi_mat
        ev = np.asarray(instance.graph.edges, dtype=np.int64)
        total += float(np.sum(psi[np.arange(psi.shape[0]), x[ev[:, 0]], x[ev[:, 1]]]))
    return total


def shift_nonnegative(instance):
    """Shift every score table so its minimum entry is exactly zero.

    Returns (shifted_instance, offset) with offset equal to the sum of
    the per-vertex and per-edge minima, so that for every assignment x
    evaluate(shifted, x) == evaluate(original, x) - offset. Subtracting
    a constant per table never changes which assignments are optimal.
    """
    phi = instance.phi_mat
    psi = instance.psi_mat
    phi_min = phi.min(axis=1)
    new_phi = phi - phi_min[:, None]
    offset = float(np.sum(phi_min))
    if instance.graph.num_edges:
        psi_min = psi.min(axis=(1, 2))
        new_psi = psi - psi_min[:, None, None]
        offset += float(np.sum(psi_min))
    else:
        new_psi = psi.copy()
    shifted = MRFInstance(instance.graph, instance.num_labels, new_phi, new_psi)
    return shifted, offset


def is_nonnegative(instance):
    phi_ok = instance.phi_mat.size == 0 or instance.phi_mat.min() >= 0
    psi_ok = instance.psi_mat.size == 0 or instance.psi_mat.min() >= 0
    return bool(phi_ok and psi_ok)


def _label_block(codes, n, L):
    """Decode mixed-radix codes into 0-based label columns.

    Vertex 0 is the most significant digit, so ascending codes enumerate
    label vectors in lexicographic order.
    """
    out = np.empty((codes.size, n), dtype=np.int64)
    div = codes
    for v in range(n - 1, -1, -1):
        out[:, v] = div % L
        div = div // L
    return out


def brute_force_solve(instance, cap=BRUTE_FORCE_CAP):
    """Exhaustive maximization. The oracle every solver is tested against.

    Enumerates all L**n label vectors in ascending mixed-radix order
    (vertex 0 most significant) and keeps the first maximizer, which is
    therefore the lexicographically smallest optimal assignment.
    """
    n = instance.graph.num_vertices
    L = instance.num_labels
    total = L**n
    if total > cap:
        raise TooLargeError(
            f"brute force needs {total} assignments, cap is {cap}"
        )
    phi = instance.phi_mat
    psi = instance.psi_mat
    ev = np.asarray(instance.graph.edges, dtype=np.int64).reshape(-1, 2)
    eidx = np.arange(ev.shape[0])
    best_val = -np.inf
    best_code = -1
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        lab = _label_block(codes, n, L)
        vals = phi[np.arange(n), lab].sum(axis=1)
        if ev.shape[0]:
            vals += psi[eidx, lab[:, ev[:, 0]], lab[:, ev[:, 1]]].sum(axis=1)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_code = int(codes[i])
    labels = _label_block(np.array([best_code]), n, L)[0] + 1
    return labels, best_val


def validate(instance):
    """Collect violations as strings; empty list means valid.

    Unlike the numeric accessors this walks the raw phi/psi containers,
    so ragged rows and NaNs are reported instead of raised.
    """
    violations = []
    g = instance.graph
    L = instance.num_labels
    if L < 1:
        violations.append(f"num_labels is {L}, must be >= 1")
    seen = set()
    for i, (u, v) in enumerate(g.edges):
        if u == v:
            violations.append(f"edge {i} is a self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            violations.append(f"edge {i} duplicates edge {key}")
        seen.add(key)

    phi = instance.phi
    if len(phi) != g.num_vertices:
        violations.append(
            f"phi has {len(phi)} rows, expected {g.num_vertices}"
        )
    else:
        for v in range(g.num_vertices):
            row = np.atleast_1d(np.asarray(phi[v], dtype=object))
            if row.shape != (L,):
                violations.append(
                    f"phi row for vertex {v} has length {row.size}, expected {L}"
                )
                continue
            vals = row.astype(np.float64)
            if not np.all(np.isfinite(vals)):
                violations.append(f"phi row for vertex {v} has a non-finite entry")

    psi = instance.psi
    if len(psi) != g.num_edges:
        violations.append(f"psi has {len(psi)} tables, expected {g.num_edges}")
    else:
        for e in range(g.num_edges):
            tab = np.asarray(psi[e], dtype=object)
            flat = tab.reshape(-1) if tab.ndim in (1, 2) else None
            if flat is None or flat.size != L * L:
                size = flat.size if flat is not None else "non-rectangular"
                violations.append(
                    f"psi table for edge {e} has {size} entries, expected {L * L}"
                )
                continue
            vals = flat.astype(np.float64)
            if not np.all(np.isfinite(vals)):
                violations.append(f"psi table for edge {e} has a non-finite entry")
    return violations


def random_instance(
    height,
    width,
    num_labels,
    low,
    high,
    seed,
    extra_edge_prob=0.5,
):
    """Random connected spanning subgraph of a grid with integer tables.

    Keeps all height*width vertices, a uniformly seeded spanning tree of
    the grid, and each remaining grid edge independently with
    `extra_edge_prob`. phi/psi entries are integers drawn uniformly from
    [low, high]. Same arguments, same instance.
    """
    if low > high:
        raise InvalidInstanceError("empty score range")
    rng = np.random.default_rng(seed)
    full = grid_graph(height, width)
    m = full.num_edges
    order = rng.permutation(m)
    parent = list(range(full.num_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    keep = np.zeros(m, dtype=bool)
    for ei in order:
        u, v = full.edges[ei]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            keep[ei] = True
    extra = rng.random(m) < extra_edge_prob
    keep |= extra
    edges = [full.edges[i] for i in range(m) if keep[i]]
    graph = Graph(full.num_vertices, edges, grid_shape=(height, width))
    L = int(num_labels)
    phi = rng.integers(low, high + 1, size=(graph.num_vertices, L)).astype(np.float64)
    psi = rng.integers(low, high + 1, size=(graph.num_edges, L, L)).astype(np.float64)
    return MRFInstance(graph, L, phi, psi)
