"""Branch decompositions: structure, width, rooting, boundaries, builders.

A branch decomposition of a graph is an unrooted tree whose leaves
correspond one-to-one with the graph's edges and whose internal nodes
all have degree three. Removing a tree edge splits the graph's edges in
two; the vertices incident to edges on both sides are the cut's
boundary, and the width of the decomposition is the largest boundary
over all tree edges. The exact solver's tables are indexed by labelings
of these boundaries, so narrow decompositions are the whole game.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .errors import BuildError, DecompositionError, InputError


class BranchDecomposition:
    """Unrooted decomposition tree.

    neighbors[i] lists node i's tree neighbors; leaf_edge[i] is the
    graph edge id carried by leaf i, or -1 for internal nodes.
    """

    def __init__(self, neighbors, leaf_edge):
        self.neighbors = [list(ns) for ns in neighbors]
        self.leaf_edge = list(leaf_edge)
        self.measured_width = None
        self._tree_edges = None
        self._rooted_cache = None

    @property
    def num_nodes(self):
        return len(self.neighbors)

    @property
    def num_leaves(self):
        return sum(1 for e in self.leaf_edge if e >= 0)

    @property
    def tree_edges(self):
        """Deterministic enumeration of tree edges as sorted (a, b) pairs."""
        if self._tree_edges is None:
            pairs = set()
            for a, ns in enumerate(self.neighbors):
                for b in ns:
                    pairs.add((a, b) if a < b else (b, a))
            self._tree_edges = sorted(pairs)
        return self._tree_edges

    def __repr__(self):
        return f"BranchDecomposition(nodes={self.num_nodes}, leaves={self.num_leaves})"


class _Builder:
    """Assembles a rooted full binary tree of leaves, then unroots it."""

    def __init__(self):
        self.adj = []
        self.leaf_edge = []

    def leaf(self, edge_id):
        self.adj.append([])
        self.leaf_edge.append(int(edge_id))
        return len(self.adj) - 1

    def join(self, a, b):
        node = len(self.adj)
        self.adj.append([a, b])
        self.leaf_edge.append(-1)
        self.adj[a].append(node)
        self.adj[b].append(node)
        return node

    def fold(self, items):
        """Left fold a nonempty item list into one subtree root."""
        acc = items[0]
        for nxt in items[1:]:
            acc = self.join(acc, nxt)
        return acc

    def finish(self, root):
        """Contract the rooted tree's degree-2 root into an unrooted tree."""
        adj = self.adj
        if len(adj) == 1:
            return BranchDecomposition([[]], self.leaf_edge)
        kids = [x for x in adj[root] if True]
        if len(kids) != 2:
            raise DecompositionError("builder root must have two children")
        a, b = kids
        adj[a] = [x if x != root else b for x in adj[a]]
        adj[b] = [x if x != root else a for x in adj[b]]
        keep = [i for i in range(len(adj)) if i != root]
        remap = {old: new for new, old in enumerate(keep)}
        neighbors = [[remap[x] for x in adj[i]] for i in keep]
        leaf_edge = [self.leaf_edge[i] for i in keep]
        return BranchDecomposition(neighbors, leaf_edge)


def validate_decomposition(decomp, graph):
    """Structural audit; returns a list of violation strings."""
    violations = []
    n = decomp.num_nodes
    deg = [len(ns) for ns in decomp.neighbors]
    edge_count = sum(deg) // 2
    if edge_count != n - 1:
        violations.append(
            f"tree has {edge_count} edges over {n} nodes, expected {n - 1}"
        )
    else:
        seen = [False] * n
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in decomp.neighbors[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        if not all(seen):
            violations.append("tree is not connected")

    m = graph.num_edges
    leaves = [i for i in range(n) if decomp.leaf_edge[i] >= 0]
    if len(leaves) != m:
        violations.append(f"{len(leaves)} leaves for {m} graph edges")
    used = {}
    for i in leaves:
        e = decomp.leaf_edge[i]
        if not 0 <= e < m:
            violations.append(f"leaf {i} maps to nonexistent edge {e}")
        elif e in used:
            violations.append(f"edge {e} mapped by leaves {used[e]} and {i}")
        else:
            used[e] = i
    for i in range(n):
        is_leaf = decomp.leaf_edge[i] >= 0
        if n == 1:
            if not is_leaf:
                violations.append("single node must be a leaf")
            continue
        if is_leaf and deg[i] != 1:
            violations.append(f"leaf {i} has degree {deg[i]}, expected 1")
        if not is_leaf and deg[i] != 3:
            violations.append(f"internal node {i} has degree {deg[i]}, expected 3")
    return violations


@dataclass
class RootedDecomposition:
    """A decomposition rooted by subdividing one tree edge.

    The new root has id num_nodes-1 (one past the unrooted ids) and
    exactly two children; every other internal node keeps its two
    children. `order` is a post-order walk, children before parents.
    """

    root: int
    parent: np.ndarray
    children: list[list[int]]
    leaf_edge: list[int]
    order: list[int]

    @property
    def num_nodes(self):
        return len(self.children)


def root_at(decomp, tree_edge=None):
    """Root `decomp` by subdividing tree edge `tree_edge` (lowest id default).

    A decomposition of a single edge has no tree edges to subdivide;
    callers short-circuit that case before decomposing.
    """
    edges = decomp.tree_edges
    if not edges:
        raise DecompositionError("cannot root a single-leaf decomposition")
    if tree_edge is None:
        tree_edge = 0
    if not 0 <= tree_edge < len(edges):
        raise InputError(f"tree edge {tree_edge} out of range")
    a, b = edges[tree_edge]
    n = decomp.num_nodes
    root = n
    parent = np.full(n + 1, -1, dtype=np.int64)
    children = [[] for _ in range(n + 1)]
    leaf_edge = list(decomp.leaf_edge) + [-1]
    parent[a] = root
    parent[b] = root
    children[root] = [a, b]
    stack = [a, b]
    while stack:
        u = stack.pop()
        p = parent[u]
        kids = sorted(
            v
            for v in decomp.neighbors[u]
            if v != p and not (u == a and v == b) and not (u == b and v == a)
        )
        children[u] = kids
        for v in kids:
            parent[v] = u
            stack.append(v)
    order = []
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
        else:
            stack.append((node, True))
            for c in reversed(children[node]):
                stack.append((c, False))
    return RootedDecomposition(
        root=root,
        parent=parent,
        children=children,
        leaf_edge=leaf_edge,
        order=order,
    )


def boundary_sets(rooted, graph):
    """Per-node boundary vertex tuples for a rooted decomposition.

    Node v's boundary is the set of vertices touched both by the graph
    edges in v's leaf subtree and by edges outside it. Computed with a
    leaf-interval trick: descendant leaves of any node are contiguous in
    DFS order, so membership is two binary searches per candidate, and
    candidates only ever come from the children's boundaries.
    """
    nn = rooted.num_nodes
    lo = [0] * nn
    hi = [0] * nn
    leaf_pos = {}
    counter = 0
    stack = [(rooted.root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            if rooted.children[node]:
                hi[node] = max(hi[c] for c in rooted.children[node])
            continue
        lo[node] = counter
        if not rooted.children[node]:
            leaf_pos[node] = counter
            counter += 1
            hi[node] = counter
            continue
        stack.append((node, True))
        for c in reversed(rooted.children[node]):
            stack.append((c, False))

    pos_by_vertex = [[] for _ in range(graph.num_vertices)]
    for node, pos in leaf_pos.items():
        u, v = graph.edges[rooted.leaf_edge[node]]
        pos_by_vertex[u].append(pos)
        pos_by_vertex[v].append(pos)
    for p in pos_by_vertex:
        p.sort()

    out = [()] * nn
    for node in rooted.order:
        if rooted.children[node]:
            cand = set()
            for c in rooted.children[node]:
                cand.update(out[c])
        else:
            cand = set(graph.edges[rooted.leaf_edge[node]])
        sel = []
        for w in sorted(cand):
            pos = pos_by_vertex[w]
            cnt = bisect_left(pos, hi[node]) - bisect_left(pos, lo[node])
            if 0 < cnt < len(pos):
                sel.append(w)
        out[node] = tuple(sel)
    return out


def rooted_with_boundaries(decomp, graph, tree_edge=None):
    """root_at plus boundary_sets, cached on the decomposition.

    Builders measure width on the same rooting the solver later uses, so
    the pair is computed once per (graph, tree edge) and reused. The
    cache is keyed by graph identity and never changes results.
    """
    key = 0 if tree_edge is None else tree_edge
    cached = decomp._rooted_cache
    if cached is not None and cached[0] == key and cached[1] is graph:
        return cached[2], cached[3]
    rooted = root_at(decomp, tree_edge)
    bsets = boundary_sets(rooted, graph)
    decomp._rooted_cache = (key, graph, rooted, bsets)
    return rooted, bsets


def width(decomp, graph):
    """Largest cut boundary over all tree edges; 0 for a single leaf.

    Each non-root node of a rooting corresponds to one tree-edge cut
    (the subdivided edge is seen from both of its halves), so the width
    is the largest boundary among non-root nodes.
    """
    if decomp.num_nodes == 1:
        return 0
    rooted, bsets = rooted_with_boundaries(decomp, graph, 0)
    return max(len(bsets[v]) for v in range(rooted.num_nodes) if v != rooted.root)


def debug_dump(rooted):
    """JSON-friendly dump: parent array plus leaf-to-edge map."""
    return {
        "root": int(rooted.root),
        "parent": [int(p) for p in rooted.parent],
        "leaf_edge": {
            str(i): int(e) for i, e in enumerate(rooted.leaf_edge) if e >= 0
        },
    }


def _caterpillar(edge_order):
    b = _Builder()
    items = [b.leaf(e) for e in edge_order]
    return b.finish(b.fold(items))


def build_grid_band(graph, coords, k):
    """Caterpillar decomposition of a grid band component.

    `coords` holds (row, col) per vertex of `graph`. Edges are swept in
    rotated grid coordinates: ascending (min(col-row), min(row+col),
    horizontal-before-vertical, edge id). That slices a BFS-level band
    across its thin direction, keeping the sweep frontier near k
    vertices. The result is verified against the 2k+2 width contract
    and a BuildError carrying the achieved width is raised past it.
    """
    m = graph.num_edges
    if m == 0:
        raise BuildError("cannot decompose an edgeless component")
    coords = np.asarray(coords, dtype=np.int64)

    def key(ei):
        u, v = graph.edges[ei]
        ru, cu = coords[u]
        rv, cv = coords[v]
        s = min(cu - ru, cv - rv)
        lev = min(ru + cu, rv + cv)
        if ru == rv:
            orient = 0
        elif cu == cv:
            orient = 1
        else:
            orient = 2
        return (s, lev, orient, ei)

    order = sorted(range(m), key=key)
    decomp = _caterpillar(order)
    w = width(decomp, graph)
    decomp.measured_width = w
    if w > 2 * k + 2:
        raise BuildError(
            f"band sweep produced width {w}, contract is {2 * k + 2}", width=w
        )
    return decomp


def build_heuristic(graph):
    """Decomposition for arbitrary connected graphs, no width guarantee.

    Runs a minimum-degree elimination (ties to the smallest vertex id),
    reads off a tree decomposition from the elimination cliques, assigns
    each graph edge to the bag of its earlier-eliminated endpoint, and
    binarizes bag-by-bag. Cut boundaries stay inside single bags, so the
    width is at most the largest elimination clique; it is measured and
    stored on the result rather than promised.
    """
    m = graph.num_edges
    if m == 0:
        raise BuildError("cannot decompose an edgeless component")
    if m == 1:
        decomp = _caterpillar([0])
        decomp.measured_width = 0
        return decomp

    n = graph.num_vertices
    live = {v: set() for v in range(n)}
    for u, v in graph.edges:
        live[u].add(v)
        live[v].add(u)
    elim_pos = {}
    bags = []
    order = []
    remaining = set(range(n))
    while remaining:
        v = min(remaining, key=lambda x: (len(live[x]), x))
        nbrs = sorted(live[v])
        bags.append([v] + nbrs)
        elim_pos[v] = len(order)
        order.append(v)
        for a in nbrs:
            live[a].discard(v)
        for i, a in enumerate(nbrs):
            for c in nbrs[i + 1 :]:
                live[a].add(c)
                live[c].add(a)
        del live[v]
        remaining.discard(v)

    # Tree-decomposition parent: the neighbor eliminated soonest after v.
    parent_node = [-1] * n
    for p, v in enumerate(order):
        nbrs = bags[p][1:]
        if nbrs:
            parent_node[p] = min(elim_pos[a] for a in nbrs)

    edges_at = [[] for _ in range(n)]
    for ei, (u, v) in enumerate(graph.edges):
        first = u if elim_pos[u] < elim_pos[v] else v
        edges_at[elim_pos[first]].append(ei)

    kids_of = [[] for _ in range(n)]
    for p in range(n):
        if parent_node[p] >= 0:
            kids_of[parent_node[p]].append(p)

    b = _Builder()
    block = [None] * n
    for p in range(n):
        items = [b.leaf(ei) for ei in edges_at[p]]
        items += [block[c] for c in kids_of[p] if block[c] is not None]
        if items:
            block[p] = b.fold(items)
    # Blocks with a parent were folded into it; a connected graph leaves
    # exactly one orphan, at the last elimination position.
    roots = [
        block[p] for p in range(n) if parent_node[p] == -1 and block[p] is not None
    ]
    top = b.fold(roots)
    decomp = b.finish(top)
    decomp.measured_width = width(decomp, graph)
    return decomp
