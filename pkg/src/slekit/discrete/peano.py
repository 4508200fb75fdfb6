"""Dual trees and the spanning-tree Peano curve on a rectangle.

Primal vertices are the points (i, j) of the rectangle [0, nx] x [0, ny] in
Z^2.  The bottom side is the wired arc: its vertices are merged into one
vertex ``R`` and the edges along it disappear.  Dual vertices are the face
centres (i + 1/2, j + 1/2) plus one exterior vertex ``X`` standing for
everything beyond the left, top and right sides.  Each primal edge off the
bottom side crosses exactly one dual edge, and the dual tree consists of the
dual edges whose primal edge is not in the tree.  The dual graph has
parallel edges at X, so dual trees record the index of each parent edge.

The Peano curve runs on (1/2) Z^2 + (1/4, 1/4) inside the polygon bounded
by the bottom side and the dual lines x = -1/2, y = ny + 1/2,
x = nx + 1/2.  Steps across a tree edge or a dual-tree edge are blocked;
every refined point then has exactly two open steps except the two bottom
corners, so the open steps form a single path between them.

Internally all coordinates are multiplied by 4: primal vertices sit at
(4i, 4j), dual vertices at (4i + 2, 4j + 2) and refined points at odd
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .graphs import LatticeGraph, SpanningTree


class PeanoDomain:
    """Primal and dual graphs of an nx x ny rectangle wired along the bottom."""

    def __init__(self, nx: int, ny: int):
        if nx < 1 or ny < 1:
            raise DomainError("rectangle needs at least one cell in each direction")
        self.nx, self.ny = nx, ny
        # primal: (i, j) for j >= 1 gets index i + (nx + 1) * (j - 1); R is last
        self.R = (nx + 1) * ny
        # dual: face (i, j) gets index i + nx * j; X is last
        self.X = nx * ny
        p_edges, d_edges, keys = [], [], []
        for j in range(1, ny + 1):
            for i in range(nx):
                # horizontal primal edge at height j, crossed by a vertical dual edge
                p_edges.append((self.pv(i, j), self.pv(i + 1, j)))
                d_edges.append((self.dv(i, j - 1), self.dv(i, j)))
                keys.append(("h", i, j))
        for j in range(ny):
            for i in range(nx + 1):
                # vertical primal edge from (i, j) to (i, j + 1)
                p_edges.append((self.pv(i, j), self.pv(i, j + 1)))
                d_edges.append((self.dv(i - 1, j), self.dv(i, j)))
                keys.append(("v", i, j))
        self.primal_edges = [tuple(sorted(e)) for e in p_edges]
        self.dual_edges = [tuple(sorted(e)) for e in d_edges]
        self.edge_keys = keys
        self._p_index = {e: k for k, e in enumerate(self.primal_edges)}
        self._d_index = {e: k for k, e in enumerate(self.dual_edges)}
        pc = [complex(i, j) for j in range(1, ny + 1) for i in range(nx + 1)] + [complex(nx / 2, 0)]
        dc = [complex(i + 0.5, j + 0.5) for j in range(ny) for i in range(nx)] + [
            complex(nx / 2, ny + 0.5)]
        self.primal = LatticeGraph.from_edges(self.R + 1, self.primal_edges, pc)
        self.dual = LatticeGraph.from_edges(self.X + 1, self.dual_edges, dc)

    def pv(self, i: int, j: int) -> int:
        if j == 0:
            return self.R
        return i + (self.nx + 1) * (j - 1)

    def dv(self, i: int, j: int) -> int:
        if i < 0 or i >= self.nx or j >= self.ny:
            return self.X
        if j < 0:
            raise DomainError("no dual vertex below the wired side")
        return i + self.nx * j

    @property
    def start(self) -> complex:
        """First point of the Peano curve (bottom-left corner)."""
        return complex(-0.25, 0.25)

    @property
    def end(self) -> complex:
        return complex(self.nx + 0.25, 0.25)


def _tree_edge_mask(edges_of_tree, index, n_edges):
    mask = np.zeros(n_edges, dtype=bool)
    for e in edges_of_tree:
        e = tuple(sorted(e))
        if e not in index:
            raise DomainError(f"{e} is not an edge of the graph")
        mask[index[e]] = True
    return mask


def dual_tree(domain: PeanoDomain, tree: SpanningTree) -> SpanningTree:
    """Tree on the dual graph made of dual edges not crossing ``tree``,
    rooted at the exterior vertex."""
    tree.check(domain.primal)
    in_t = _tree_edge_mask(tree.edges(), domain._p_index, len(domain.primal_edges))
    ids = np.flatnonzero(~in_t)
    return _root_edges(domain.X + 1, domain.dual_edges, ids, domain.X)


def primal_tree(domain: PeanoDomain, dtree: SpanningTree) -> SpanningTree:
    """Inverse of :func:`dual_tree`, rooted at the wired vertex."""
    if dtree.parent_edge is None:
        raise DomainError("dual tree must carry parent edge indices")
    in_d = np.zeros(len(domain.dual_edges), dtype=bool)
    kids = np.flatnonzero(dtree.parent != np.arange(len(dtree.parent)))
    in_d[dtree.parent_edge[kids]] = True
    ids = np.flatnonzero(~in_d)
    t = _root_edges(domain.R + 1, domain.primal_edges, ids, domain.R)
    t.check(domain.primal)
    return t


def _root_edges(n: int, edge_list, ids, root: int) -> SpanningTree:
    if len(ids) != n - 1:
        raise DomainError("edges do not form a spanning tree")
    adj = [[] for _ in range(n)]
    for k in ids:
        a, b = edge_list[k]
        adj[a].append((b, k))
        adj[b].append((a, k))
    parent = np.full(n, -1, dtype=np.int64)
    pedge = np.full(n, -1, dtype=np.int64)
    parent[root] = root
    stack = [root]
    while stack:
        v = stack.pop()
        for w, k in adj[v]:
            if parent[w] < 0:
                parent[w] = v
                pedge[w] = k
                stack.append(w)
    if np.any(parent < 0):
        raise DomainError("edges do not form a spanning tree")
    return SpanningTree(parent, pedge)


@dataclass
class PeanoCurve:
    """Polyline on (1/2) Z^2 + (1/4, 1/4) in units of the grid spacing."""

    points: np.ndarray

    def __len__(self):
        return len(self.points)


def peano_curve(domain: PeanoDomain, tree: SpanningTree, delta: float = 1.0) -> PeanoCurve:
    """Curve winding between ``tree`` and its dual tree, from
    ``domain.start`` to ``domain.end`` (scaled by ``delta``)."""
    tree.check(domain.primal)
    nx, ny = domain.nx, domain.ny
    in_t = _tree_edge_mask(tree.edges(), domain._p_index, len(domain.primal_edges))
    kind = {key: bool(in_t[k]) for k, key in enumerate(domain.edge_keys)}

    xs = np.arange(-1, 4 * nx + 2, 2)
    ys = np.arange(1, 4 * ny + 2, 2)
    n_pts = len(xs) * len(ys)

    def inside(x, y):
        return -1 <= x <= 4 * nx + 1 and 1 <= y <= 4 * ny + 1

    def blocked(x, y, dx, dy):
        if not inside(x + 2 * dx, y + 2 * dy):
            return True
        if dx:
            lx = x + dx  # vertical line crossed at height y
            j, rem = divmod(y, 4)
            if lx % 4 == 0:
                i = lx // 4
                # primal vertical edge (i, j)-(i, j+1) crosses here if j < ny
                return j < ny and kind[("v", i, j)]
            i = (lx - 2) // 4
            # dual vertical edge crossing the horizontal primal edge at height j or j+1
            jj = j if rem == 1 else j + 1
            if jj == 0:
                return False
            return not kind[("h", i, jj)]
        ly = y + dy
        i, rem = divmod(x, 4)
        if ly % 4 == 0:
            j = ly // 4
            if j == 0:
                return True
            # primal horizontal edge (i, j)-(i+1, j) exists for 0 <= i < nx
            return 0 <= i < nx and kind[("h", i, j)]
        j = (ly - 2) // 4
        ii = i if rem == 1 else i + 1
        if x < 0:
            ii = 0
        return not kind[("v", ii, j)]

    pts = [(-1, 1)]
    prev = None
    cur = (-1, 1)
    for _ in range(n_pts - 1):
        nxt = None
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            cand = (cur[0] + 2 * dx, cur[1] + 2 * dy)
            if cand == prev or blocked(cur[0], cur[1], dx, dy):
                continue
            nxt = cand
            break
        if nxt is None:
            raise DomainError("Peano curve stopped early; tree is not spanning")
        prev, cur = cur, nxt
        pts.append(cur)
    arr = np.asarray(pts, dtype=float)
    if tuple(pts[-1]) != (4 * nx + 1, 1) or len(set(pts)) != n_pts:
        raise DomainError("Peano curve does not fill the domain")
    return PeanoCurve(delta * (arr[:, 0] + 1j * arr[:, 1]) / 4.0)
