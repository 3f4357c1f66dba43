"""Reductions between the MRF solver and neighboring problems.

Correlation clustering rides on four labels: a positive edge pays its
weight when the endpoints share a label, a negative edge pays when they
differ, and four labels are enough for any planar instance to realize
an optimal clustering's agreement pattern. Max-Cut and 3-coloring get
the textbook two- and three-label gadgets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, TooLargeError
from .graph import Graph
from .mrf import MRFInstance, check_labels

PARTITION_ENUM_CAP = 10


@dataclass
class CCEdge:
    u: int
    v: int
    p: int  # 0: reward equality, 1: reward difference
    w: float  # nonnegative


@dataclass
class CCInstance:
    """Correlation clustering input on an explicit graph."""

    num_vertices: int
    edges: list[CCEdge]

    def graph(self):
        return Graph(self.num_vertices, [(e.u, e.v) for e in self.edges])


def cc_to_mrf(cc):
    """Four-label MRF whose optimum value equals the best clustering's.

    phi is identically zero. An equality edge (p=0) scores w on equal
    labels, a difference edge (p=1) scores w on unequal labels.
    """
    L = 4
    g = cc.graph()
    phi = np.zeros((cc.num_vertices, L))
    psi = np.zeros((len(cc.edges), L, L))
    eye = np.eye(L)
    for i, e in enumerate(cc.edges):
        if e.w < 0:
            raise InputError(f"edge {i} has negative weight {e.w}")
        if e.p not in (0, 1):
            raise InputError(f"edge {i} has polarity {e.p}, expected 0 or 1")
        psi[i] = e.w * (eye if e.p == 0 else (1.0 - eye))
    return MRFInstance(g, L, phi, psi)


def labels_to_clustering(cc, labels):
    """Clusters = connected components of the equal-label subgraph.

    Returns a cluster id per vertex; ids count up in order of each
    cluster's smallest member. Two vertices sharing a label but not
    connected by a same-label path land in different clusters, which
    never scores worse on a planar instance.
    """
    g = cc.graph()
    labels = check_labels(_dummy_instance(cc), labels)
    parent = list(range(cc.num_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in cc.edges:
        if labels[e.u] == labels[e.v]:
            ra, rb = find(e.u), find(e.v)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    rep = [find(v) for v in range(cc.num_vertices)]
    ids = {}
    out = np.zeros(cc.num_vertices, dtype=np.int64)
    for v in range(cc.num_vertices):
        if rep[v] not in ids:
            ids[rep[v]] = len(ids)
        out[v] = ids[rep[v]]
    return out


def _dummy_instance(cc):
    return MRFInstance(
        cc.graph(), 4, np.zeros((cc.num_vertices, 4)), np.zeros((len(cc.edges), 4, 4))
    )


def cc_value(cc, clusters):
    """Agreement value of a clustering (cluster id per vertex)."""
    clusters = np.asarray(clusters)
    if clusters.shape != (cc.num_vertices,):
        raise InputError("clustering has the wrong length")
    total = 0.0
    for e in cc.edges:
        same = clusters[e.u] == clusters[e.v]
        if (e.p == 0) == bool(same):
            total += e.w
    return float(total)


def enumerate_clusterings(n, cap=PARTITION_ENUM_CAP):
    """All set partitions of range(n) as restricted-growth label arrays."""
    if n > cap:
        raise TooLargeError(f"partition enumeration capped at {cap} vertices")
    code = np.zeros(n, dtype=np.int64)
    while True:
        yield code.copy()
        i = n - 1
        while i > 0:
            if code[i] <= code[:i].max():
                code[i] += 1
                code[i + 1 :] = 0
                break
            i -= 1
        else:
            return


def best_clustering_exhaustive(cc, cap=PARTITION_ENUM_CAP):
    """Optimal clustering by Bell-number enumeration; small inputs only."""
    best = None
    best_val = -np.inf
    for clusters in enumerate_clusterings(cc.num_vertices, cap):
        val = cc_value(cc, clusters)
        if val > best_val:
            best_val = val
            best = clusters
    return best, float(best_val)


def maxcut_gadget(graph):
    """Two-label instance whose optimum equals the graph's max cut."""
    phi = np.zeros((graph.num_vertices, 2))
    psi = np.zeros((graph.num_edges, 2, 2))
    psi[:, 0, 1] = 1.0
    psi[:, 1, 0] = 1.0
    return MRFInstance(graph, 2, phi, psi)


def coloring_gadget(graph):
    """Three-label instance: optimum 0 iff the graph is 3-colorable.

    Every monochromatic edge costs 1, so the optimum is minus the
    smallest possible number of violated edges. Entries are negative;
    this is for the exact solver or the oracle, not the slab scheme.
    """
    phi = np.zeros((graph.num_vertices, 3))
    psi = np.zeros((graph.num_edges, 3, 3))
    idx = np.arange(3)
    psi[:, idx, idx] = -1.0
    return MRFInstance(graph, 3, phi, psi)
