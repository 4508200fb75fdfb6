"""Graphs, loop-erased random walk and Wilson's algorithm.

Graphs are stored in compressed adjacency form (``indptr``, ``indices``) so
the random-walk loops can run compiled.  Each step of a walk picks a
uniformly random neighbour from one pre-drawn uniform; when the buffer runs
out the walk is restarted with twice as many draws from the same stream,
which reproduces the prefix exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numba
import numpy as np

from ..errors import DomainError, NumericError
from ..rng import stream, uniforms
from .unionfind import UnionFind


@dataclass
class LatticeGraph:
    """Undirected simple graph with optional planar coordinates."""

    n_vertices: int
    indptr: np.ndarray
    indices: np.ndarray
    coords: np.ndarray | None = None
    targets: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], coords=None,
                   targets: Iterable[int] = ()) -> "LatticeGraph":
        edges = [(int(a), int(b)) for a, b in edges]
        for a, b in edges:
            if a == b:
                raise DomainError("self-loops are not allowed")
            if not (0 <= a < n and 0 <= b < n):
                raise DomainError("edge endpoint out of range")
        nbrs = [set() for _ in range(n)]
        for a, b in edges:
            nbrs[a].add(b)
            nbrs[b].add(a)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(s) for s in nbrs])
        indices = np.fromiter((v for s in nbrs for v in sorted(s)), dtype=np.int64,
                              count=int(indptr[-1]))
        if coords is not None:
            coords = np.asarray(coords, dtype=complex)
        return cls(n, indptr, indices, coords, frozenset(int(t) for t in targets))

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v in range(self.n_vertices):
            for w in self.neighbors(v):
                if v < w:
                    out.append((v, int(w)))
        return out

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return False
        uf = UnionFind(self.n_vertices)
        for a, b in self.edges():
            uf.union(a, b)
        root = uf.find(0)
        return all(uf.find(v) == root for v in range(self.n_vertices))

    def laplacian(self) -> np.ndarray:
        L = np.zeros((self.n_vertices, self.n_vertices))
        for a, b in self.edges():
            L[a, b] -= 1
            L[b, a] -= 1
            L[a, a] += 1
            L[b, b] += 1
        return L


def grid_graph(nx: int, ny: int, delta: float = 1.0) -> LatticeGraph:
    """nx x ny vertices of delta Z^2; vertex (i, j) has index i + nx * j."""
    if nx < 1 or ny < 1:
        raise DomainError("grid needs at least one vertex in each direction")
    edges = []
    for j in range(ny):
        for i in range(nx):
            v = i + nx * j
            if i + 1 < nx:
                edges.append((v, v + 1))
            if j + 1 < ny:
                edges.append((v, v + nx))
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny))
    coords = delta * (ii.ravel() + 1j * jj.ravel())
    return LatticeGraph.from_edges(nx * ny, edges, coords)


def cycle_graph(n: int) -> LatticeGraph:
    if n < 3:
        raise DomainError("a cycle needs at least 3 vertices")
    return LatticeGraph.from_edges(n, [(k, (k + 1) % n) for k in range(n)])


def path_graph(n: int) -> LatticeGraph:
    if n < 1:
        raise DomainError("need at least one vertex")
    return LatticeGraph.from_edges(n, [(k, k + 1) for k in range(n - 1)])


def spanning_tree_count(g: LatticeGraph) -> int:
    """Number of spanning trees (determinant of a reduced Laplacian)."""
    L = g.laplacian()
    if g.n_vertices == 1:
        return 1
    sign, logdet = np.linalg.slogdet(L[1:, 1:])
    if sign <= 0:
        return 0
    return int(round(float(np.exp(logdet))))


@dataclass
class SpanningTree:
    """Rooted spanning tree; ``parent[root] == root``.

    ``parent_edge`` optionally names the edge (by index in some edge list)
    joining each vertex to its parent, for graphs with parallel edges.
    """

    parent: np.ndarray
    parent_edge: np.ndarray | None = None

    def __post_init__(self):
        self.parent = np.asarray(self.parent, dtype=np.int64)
        if self.parent_edge is not None:
            self.parent_edge = np.asarray(self.parent_edge, dtype=np.int64)

    @property
    def root(self) -> int:
        roots = np.flatnonzero(self.parent == np.arange(len(self.parent)))
        if len(roots) != 1:
            raise DomainError("tree must have exactly one root")
        return int(roots[0])

    def edges(self) -> list[tuple[int, int]]:
        """Edges as sorted pairs, in vertex order."""
        return [(min(v, int(p)), max(v, int(p))) for v, p in enumerate(self.parent) if p != v]

    def edge_set(self) -> frozenset:
        return frozenset(self.edges())

    def check(self, g: LatticeGraph) -> None:
        """Assert that this is a spanning tree of ``g``."""
        n = g.n_vertices
        if len(self.parent) != n:
            raise DomainError("tree does not span the graph")
        self.root
        for v, p in enumerate(self.parent):
            if p != v and p not in g.neighbors(v):
                raise DomainError(f"tree edge {(v, int(p))} is not an edge of the graph")
        uf = UnionFind(n)
        for a, b in self.edges():
            if not uf.union(a, b):
                raise DomainError("tree contains a cycle")
        if len(self.edges()) != n - 1:
            raise DomainError("tree does not span the graph")

    def path_to_root(self, v: int) -> list[int]:
        out = [int(v)]
        while self.parent[out[-1]] != out[-1]:
            out.append(int(self.parent[out[-1]]))
            if len(out) > len(self.parent):
                raise DomainError("parent pointers contain a cycle")
        return out

    def path(self, u: int, v: int) -> list[int]:
        """The unique tree path from u to v."""
        pu = self.path_to_root(u)
        pv = self.path_to_root(v)
        on_v = {w: k for k, w in enumerate(pv)}
        for k, w in enumerate(pu):
            if w in on_v:
                return pu[:k + 1] + pv[:on_v[w]][::-1]
        raise DomainError("vertices are in different components")


def loop_erase(walk: Sequence, targets: Iterable) -> list:
    """Chronological loop erasure of ``walk`` stopped at its first visit to
    ``targets``.

    beta_0 = walk[0] and beta_{n+1} = walk[1 + last index m <= T with
    walk[m] = beta_n], where T is the first hitting time of ``targets``.
    """
    targets = set(targets)
    hit = next((k for k, v in enumerate(walk) if v in targets), None)
    if hit is None:
        raise DomainError("walk never reaches the target set")
    last = {}
    for k in range(hit + 1):
        last[walk[k]] = k
    out = [walk[0]]
    k = 0
    while k != hit:
        k = last[walk[k]] + 1
        out.append(walk[k])
        if walk[k] in targets:
            break
    return out


@numba.njit(cache=True)
def _walk_kernel(indptr, indices, start, is_target, u):
    out = np.empty(u.shape[0] + 1, dtype=np.int64)
    out[0] = start
    v = start
    n = 0
    if is_target[v]:
        return out[:1], True
    for k in range(u.shape[0]):
        lo = indptr[v]
        deg = indptr[v + 1] - lo
        v = indices[lo + int(u[k] * deg)]
        n += 1
        out[n] = v
        if is_target[v]:
            return out[:n + 1], True
    return out[:n + 1], False


def random_walk(g: LatticeGraph, u: int, V: Iterable[int], seed: int, index: int = 0,
                max_steps: int = 10**9) -> np.ndarray:
    """Simple random walk from u stopped on first hitting V."""
    V = set(int(v) for v in V)
    if not V:
        raise DomainError("target set is empty")
    is_target = np.zeros(g.n_vertices, dtype=np.bool_)
    is_target[list(V)] = True
    n = 1024
    while True:
        draws = uniforms(stream(seed, index), n)
        walk, done = _walk_kernel(g.indptr, g.indices, int(u), is_target, draws)
        if done:
            return walk
        if n >= max_steps:
            raise NumericError("random walk did not reach the target set")
        n *= 2


@numba.njit(cache=True)
def _loop_erase_kernel(walk, n_vertices):
    last = np.full(n_vertices, -1, dtype=np.int64)
    for k in range(walk.shape[0]):
        last[walk[k]] = k
    out = np.empty(walk.shape[0], dtype=np.int64)
    out[0] = walk[0]
    m = 1
    k = 0
    end = walk.shape[0] - 1
    while k != end:
        k = last[walk[k]] + 1
        out[m] = walk[k]
        m += 1
    return out[:m]


def lerw(g: LatticeGraph, u: int, V: Iterable[int], seed: int, index: int = 0) -> list[int]:
    """Loop-erased random walk from u to V."""
    walk = random_walk(g, u, V, seed, index)
    return [int(v) for v in _loop_erase_kernel(walk, g.n_vertices)]


@numba.njit(cache=True)
def _wilson_kernel(indptr, indices, root, order, u):
    n = indptr.shape[0] - 1
    in_tree = np.zeros(n, dtype=np.bool_)
    nxt = np.full(n, -1, dtype=np.int64)
    in_tree[root] = True
    nxt[root] = root
    pos = 0
    for i in order:
        v = i
        while not in_tree[v]:
            if pos >= u.shape[0]:
                return nxt, False
            lo = indptr[v]
            deg = indptr[v + 1] - lo
            nxt[v] = indices[lo + int(u[pos] * deg)]
            pos += 1
            v = nxt[v]
        v = i
        while not in_tree[v]:
            in_tree[v] = True
            v = nxt[v]
    return nxt, True


def wilson_ust(g: LatticeGraph, seed: int, index: int = 0, root: int = 0) -> SpanningTree:
    """Uniform spanning tree by Wilson's algorithm.

    Vertices are added in index order, each by a loop-erased random walk to
    the current tree (the erasure is implicit in the last-exit pointers).
    """
    if not g.is_connected():
        raise DomainError("graph is not connected")
    order = np.arange(g.n_vertices, dtype=np.int64)
    n = 8 * g.n_vertices + 64
    while True:
        draws = uniforms(stream(seed, index), n)
        nxt, done = _wilson_kernel(g.indptr, g.indices, int(root), order, draws)
        if done:
            return SpanningTree(nxt)
        n *= 2
