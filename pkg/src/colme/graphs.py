"""Undirected agent interaction graphs with permanent edge pruning.

A ``Graph`` is an immutable snapshot: simple (no self-loops, no
multi-edges), symmetric, vertices 0..n-1. Edges are held both as a
canonical (E, 2) array of pairs with i < j, sorted lexicographically,
and as CSR adjacency arrays for the kernels. Pruning produces a new
snapshot; removed edges never return.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph over agents 0..n-1."""

    n: int
    edge_array: np.ndarray   # (E, 2) int64, each row i < j, rows sorted
    indptr: np.ndarray       # (n+1,) int64 CSR row pointers
    indices: np.ndarray      # (2E,) int64 neighbor lists, sorted per row
    degrees: np.ndarray      # (n,) int64

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from any iterable/array of (i, j) pairs; validates and canonicalizes."""
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        edges = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                           dtype=np.int64)
        if edges.size == 0:
            edges = edges.reshape(0, 2)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValueError("edges must be pairs of vertex indices")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        canon = np.sort(edges, axis=1)
        canon = np.unique(canon, axis=0)
        return cls._from_canonical(n, canon)

    @classmethod
    def _from_canonical(cls, n: int, canon: np.ndarray) -> "Graph":
        # trusts canon: i<j rows, lexicographically sorted, unique
        u, v = canon[:, 0], canon[:, 1]
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        indices = dst[order]
        degrees = np.bincount(src, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        return cls(n=n, edge_array=canon, indptr=indptr,
                   indices=indices, degrees=degrees)

    @property
    def n_edges(self) -> int:
        return int(self.edge_array.shape[0])

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        nbrs = self.neighbors(i)
        return bool(np.searchsorted(nbrs, j) < len(nbrs) and
                    nbrs[np.searchsorted(nbrs, j)] == j)

    def adjacency_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        if self.n_edges:
            u, v = self.edge_array[:, 0], self.edge_array[:, 1]
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a

    def to_edge_list(self) -> str:
        """Debug export: one 'i j' pair per line, i<j, lexicographic order."""
        return "".join(f"{u} {v}\n" for u, v in self.edge_array)

    @classmethod
    def from_edge_list(cls, text: str, n: int | None = None) -> "Graph":
        pairs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"edge list line {lineno}: expected 'i j', got {line!r}")
            pairs.append((int(parts[0]), int(parts[1])))
        if n is None:
            n = max((max(p) for p in pairs), default=-1) + 1
            n = max(n, 1)
        return cls.from_edges(n, pairs)


@dataclass(frozen=True)
class LaplacianOperator:
    """L = D - A for a graph, stored sparse; matvec is O(edges)."""

    graph: Graph

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def degrees(self) -> np.ndarray:
        return self.graph.degrees

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return kernels.laplacian_matvec(self.graph.indptr, self.graph.indices,
                                        self.graph.degrees, np.asarray(x, dtype=np.float64))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.graph.degrees.astype(np.float64)) - self.graph.adjacency_dense()


@dataclass(frozen=True)
class ComponentPartition:
    """Connected components: a label per agent plus the member sets.

    Components are numbered by their smallest member, ascending.
    """

    labels: np.ndarray            # (n,) int64 component id per agent
    components: list = field(default_factory=list)  # list of int64 arrays

    @property
    def n_components(self) -> int:
        return len(self.components)


def build_random_graph(n: int, r: int, seed) -> Graph:
    """Random near-regular graph with maximum degree r.

    Shuffles a multiset of r stubs per vertex, pairs consecutive stubs
    greedily, and discards self-loops and duplicate pairs, so every
    degree is <= r and most equal r. Deterministic given the seed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if r == 0 or n == 1:
        return Graph.from_edges(n, [])
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), r)
    stubs = rng.permutation(stubs)
    if stubs.shape[0] % 2:
        stubs = stubs[:-1]
    pairs = stubs.reshape(-1, 2)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    return Graph.from_edges(n, pairs)  # from_edges dedupes


def laplacian(g: Graph) -> LaplacianOperator:
    return LaplacianOperator(g)


def connected_components(g: Graph) -> ComponentPartition:
    """Iterative BFS partition; component ids ordered by smallest member."""
    labels = np.full(g.n, -1, dtype=np.int64)
    components = []
    stack = []
    for start in range(g.n):
        if labels[start] >= 0:
            continue
        cid = len(components)
        labels[start] = cid
        stack.append(start)
        members = [start]
        while stack:
            i = stack.pop()
            for j in g.neighbors(i):
                if labels[j] < 0:
                    labels[j] = cid
                    stack.append(int(j))
                    members.append(int(j))
        components.append(np.array(sorted(members), dtype=np.int64))
    return ComponentPartition(labels=labels, components=components)


def prune_edges(g: Graph, lower, upper) -> tuple[Graph, int]:
    """Remove every edge whose endpoint confidence intervals are disjoint.

    ``lower``/``upper`` give the closed interval per agent. An edge (a, b)
    survives iff max(lower) <= min(upper) over the pair, so intervals that
    merely touch at an endpoint keep the edge. Returns the pruned snapshot
    and the number of edges removed.
    """
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    if lower.shape != (g.n,) or upper.shape != (g.n,):
        raise ValueError("need one interval per agent")
    if np.any(lower > upper):
        raise ValueError("interval with lower > upper")
    if g.n_edges == 0:
        return g, 0
    u, v = g.edge_array[:, 0], g.edge_array[:, 1]
    keep = np.maximum(lower[u], lower[v]) <= np.minimum(upper[u], upper[v])
    removed = int(keep.size - np.count_nonzero(keep))
    if removed == 0:
        return g, 0
    return Graph._from_canonical(g.n, g.edge_array[keep]), removed
