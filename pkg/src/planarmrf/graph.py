"""Undirected simple graphs, grid constructors, and BFS level machinery.

Vertices are integers 0..n-1. The edge list is ordered and that order is
load-bearing: pairwise score tables and decomposition leaves refer to
edges by their index in it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConnectivityError, InputError


class Graph:
    """Immutable-by-convention undirected simple graph.

    Parameters
    ----------
    num_vertices : int
    edges : iterable of (u, v) pairs, orientation preserved
    grid_shape : optional (height, width) when vertex ids are row-major
        grid coordinates; lets downstream code recover (row, col).
    """

    def __init__(self, num_vertices, edges, grid_shape=None):
        if num_vertices < 0:
            raise InputError("num_vertices must be nonnegative")
        edges = [(int(u), int(v)) for u, v in edges]
        seen = set()
        for i, (u, v) in enumerate(edges):
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise InputError(f"edge {i} endpoint out of range: ({u}, {v})")
            if u == v:
                raise InputError(f"edge {i} is a self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise InputError(f"edge {i} duplicates edge {key}")
            seen.add(key)
        if grid_shape is not None:
            h, w = grid_shape
            if h * w != num_vertices:
                raise InputError("grid_shape does not match num_vertices")
            grid_shape = (int(h), int(w))
        self.num_vertices = int(num_vertices)
        self.edges = edges
        self.grid_shape = grid_shape
        adj = [[] for _ in range(num_vertices)]
        for i, (u, v) in enumerate(edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        self.adj = adj

    @property
    def num_edges(self):
        return len(self.edges)

    def degree(self, v):
        return len(self.adj[v])

    def grid_coords(self):
        """(n, 2) array of (row, col) per vertex. Requires grid_shape."""
        if self.grid_shape is None:
            raise InputError("graph carries no grid coordinates")
        h, w = self.grid_shape
        ids = np.arange(self.num_vertices)
        return np.stack([ids // w, ids % w], axis=1)

    def __repr__(self):
        return f"Graph(n={self.num_vertices}, m={self.num_edges})"


def grid_graph(height, width):
    """Build the height x width 4-neighborhood grid.

    Vertex (r, c) gets id r*width + c. Edges are emitted all-horizontal
    row-major first, then all-vertical row-major, so edge ids are stable.
    """
    if height < 1 or width < 1:
        raise InputError("grid dimensions must be positive")
    edges = []
    for r in range(height):
        for c in range(width - 1):
            i = r * width + c
            edges.append((i, i + 1))
    for r in range(height - 1):
        for c in range(width):
            i = r * width + c
            edges.append((i, i + width))
    return Graph(height * width, edges, grid_shape=(height, width))


def cycle_graph(n):
    if n < 3:
        raise InputError("cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    if n < 2:
        raise InputError("complete graph needs at least 2 vertices")
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@dataclass
class LevelMap:
    """BFS distances from a root over an entire connected graph."""

    root: int
    dist: np.ndarray  # (n,) int

    def __getitem__(self, v):
        return int(self.dist[v])


def bfs_levels(graph, root):
    """BFS level of every vertex from `root`.

    Raises ConnectivityError naming one unreachable vertex if the graph
    is not connected.
    """
    n = graph.num_vertices
    if not 0 <= root < n:
        raise InputError(f"root {root} out of range for {n} vertices")
    dist = np.full(n, -1, dtype=np.int64)
    dist[root] = 0
    queue = [root]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        du = dist[u]
        for v, _ in graph.adj[u]:
            if dist[v] < 0:
                dist[v] = du + 1
                queue.append(v)
    if len(queue) != n:
        bad = int(np.flatnonzero(dist < 0)[0])
        raise ConnectivityError(
            f"vertex {bad} is unreachable from root {root}", vertex=bad
        )
    return LevelMap(root=int(root), dist=dist)


def edge_r_levels(graph, levels):
    """Per-edge level relative to the BFS root.

    An edge whose endpoint levels differ by exactly one gets the larger
    level; an edge within a single level gets None and is never deleted
    by the slab scheme. BFS levels never differ by more than one across
    an edge, so those are the only cases.
    """
    out = []
    d = levels.dist
    for u, v in graph.edges:
        du, dv = int(d[u]), int(d[v])
        if du == dv:
            out.append(None)
        else:
            out.append(max(du, dv))
    return out


@dataclass
class Subgraph:
    """A subset of a graph's edges (all vertices retained)."""

    graph: Graph
    keep: np.ndarray  # (m,) bool

    @property
    def num_kept(self):
        return int(self.keep.sum())


def delete_level_classes(graph, rlevels, k, j):
    """Drop every edge whose r-level is congruent to j modulo k.

    Same-level edges (r-level None) are always kept. k=1 removes every
    leveled edge.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    if not 0 <= j < k:
        raise InputError(f"slab index {j} outside 0..{k - 1}")
    keep = np.ones(graph.num_edges, dtype=bool)
    for i, lev in enumerate(rlevels):
        if lev is not None and lev % k == j:
            keep[i] = False
    return Subgraph(graph=graph, keep=keep)


@dataclass
class Component:
    """One connected component of a Subgraph, vertex ids ascending."""

    vertices: list[int]
    edge_ids: list[int] = field(default_factory=list)


def connected_components(sub):
    """Connected components of a Subgraph, ordered by smallest vertex.

    Every vertex of the parent graph appears in exactly one component;
    vertices isolated by the edge deletions come back as singletons.
    """
    g = sub.graph
    n = g.num_vertices
    keep = sub.keep
    comp_id = np.full(n, -1, dtype=np.int64)
    comps = []
    for start in range(n):
        if comp_id[start] >= 0:
            continue
        cid = len(comps)
        comp_id[start] = cid
        stack = [start]
        verts = [start]
        while stack:
            u = stack.pop()
            for v, ei in g.adj[u]:
                if keep[ei] and comp_id[v] < 0:
                    comp_id[v] = cid
                    stack.append(v)
                    verts.append(v)
        comps.append(Component(vertices=sorted(verts)))
    for ei in np.flatnonzero(keep):
        u = g.edges[ei][0]
        comps[comp_id[u]].edge_ids.append(int(ei))
    return comps
