"""Site percolation on the triangular lattice (hexagon colourings).

Hexagons are indexed by axial coordinates ``(q, r)``; the six neighbours of a
hexagon are ``(q, r) + DIRS[i]`` listed counter-clockwise, and its centre is
at ``x = q + r/2``, ``y = r sqrt(3)/2`` (unit distance between centres).

A rhombic domain has interior hexagons ``0 <= q < W``, ``0 <= r < H`` and a
ring of boundary hexagons around it.  The ring is split into a blue arc and
a yellow arc; the exploration path starts on the hexagon edge where the
yellow arc turns into the blue arc (counter-clockwise) and ends where blue
turns back into yellow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage, sparse
from scipy.sparse.linalg import spsolve

from ..errors import DomainError, NumericError
from ..rng import coin_flips, stream, uniforms

BLUE = 1
YELLOW = 0
UNSET = -1

DIRS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))
_DIR_INDEX = {d: i for i, d in enumerate(DIRS)}
SQRT3 = math.sqrt(3.0)

# connectivity of axial neighbours for scipy.ndimage on arrays indexed [r, q]
HEX_STRUCTURE = np.array([[0, 1, 1],
                          [1, 1, 1],
                          [1, 1, 0]], dtype=bool)


def hex_center(q, r):
    """Cartesian centre of hexagon (q, r) as a complex number."""
    return (q + 0.5 * r) + 1j * (0.5 * SQRT3 * r)


def ring_cells(width: int, height: int) -> list[tuple[int, int]]:
    """Boundary hexagons of the W x H rhombus, counter-clockwise from (0, -1)."""
    W, H = width, height
    cells = [(q, -1) for q in range(0, W + 1)]
    cells += [(W, r) for r in range(0, H)]
    cells += [(q, H) for q in range(W - 1, -2, -1)]
    cells += [(-1, r) for r in range(H - 1, -1, -1)]
    return cells


def default_ring_colors(width: int, height: int) -> list[int]:
    """Blue on the bottom row and right column, yellow on top and left."""
    W, H = width, height
    return [BLUE] * (W + 1 + H) + [YELLOW] * (W + 1 + H)


@dataclass
class HexColoring:
    """Colours of a rhombic patch of hexagons plus its boundary ring.

    ``colors`` is indexed ``[q + 1, r + 1]`` and covers the interior and the
    ring; cells outside both are UNSET and never touched.
    """

    width: int
    height: int
    colors: np.ndarray
    boundary_condition: str = "default"

    @classmethod
    def rhombus(cls, width: int, height: int, ring_colors: Sequence[int] | None = None,
                interior: np.ndarray | None = None) -> "HexColoring":
        if width < 0 or height < 0:
            raise DomainError("rhombus dimensions must be non-negative")
        ring = ring_cells(width, height)
        desc = "default"
        if ring_colors is None:
            ring_colors = default_ring_colors(width, height)
        else:
            desc = "custom"
        ring_colors = list(ring_colors)
        if len(ring_colors) != len(ring):
            raise DomainError(f"expected {len(ring)} ring colours, got {len(ring_colors)}")
        if any(c not in (BLUE, YELLOW) for c in ring_colors):
            raise DomainError("boundary hexagons must be blue or yellow")
        changes = sum(ring_colors[k] != ring_colors[k - 1] for k in range(len(ring)))
        if changes != 2:
            raise DomainError("boundary must consist of exactly one blue and one yellow arc")
        colors = np.full((width + 2, height + 2), UNSET, dtype=np.int8)
        for (q, r), c in zip(ring, ring_colors):
            colors[q + 1, r + 1] = c
        if interior is not None:
            interior = np.asarray(interior)
            if interior.shape != (width, height):
                raise DomainError("interior colours must have shape (width, height)")
            colors[1:width + 1, 1:height + 1] = interior
        return cls(width, height, colors, desc)

    def copy(self) -> "HexColoring":
        return HexColoring(self.width, self.height, self.colors.copy(), self.boundary_condition)

    def get(self, q: int, r: int) -> int:
        return int(self.colors[q + 1, r + 1])

    def set(self, q: int, r: int, c: int) -> None:
        self.colors[q + 1, r + 1] = c

    def inside(self, q: int, r: int) -> bool:
        """Interior hexagon of the rhombus."""
        return 0 <= q < self.width and 0 <= r < self.height

    def known(self, q: int, r: int) -> bool:
        """Interior or ring hexagon."""
        return -1 <= q <= self.width and -1 <= r <= self.height and (
            self.inside(q, r) or (q, r) in self._ring_set())

    def _ring_set(self):
        cache = getattr(self, "_ring_cache", None)
        if cache is None:
            cache = set(ring_cells(self.width, self.height))
            self._ring_cache = cache
        return cache

    def interior(self) -> np.ndarray:
        return self.colors[1:self.width + 1, 1:self.height + 1]

    def endpoints(self):
        """(start, end) hexagon pairs (yellow, blue) of the two colour changes."""
        ring = ring_cells(self.width, self.height)
        cols = [self.get(q, r) for q, r in ring]
        n = len(ring)
        start = end = None
        for k in range(n):
            a, b = cols[k], cols[(k + 1) % n]
            if a == YELLOW and b == BLUE:
                start = (ring[k], ring[(k + 1) % n])
            elif a == BLUE and b == YELLOW:
                end = (ring[(k + 1) % n], ring[k])
        return start, end


@dataclass
class LatticePath:
    """Path along hexagon edges.

    ``vertices`` are hexagonal-lattice vertices (triangle centroids) in
    Cartesian coordinates; ``turns`` holds +1 for a left turn and -1 for a
    right turn at each step; ``edges`` lists the (yellow, blue) hexagon pair
    on the left and right of each traversed edge.
    """

    vertices: np.ndarray
    turns: np.ndarray
    edges: list = field(default_factory=list)

    def __len__(self):
        return len(self.turns)

    @property
    def directions(self) -> np.ndarray:
        """Direction of each edge as k in 0..5 (angle pi/6 + k pi/3)."""
        ang = np.angle(np.diff(self.vertices)) - math.pi / 6
        return np.mod(np.rint(ang / (math.pi / 3)), 6).astype(np.int8)


def _centroid(a, b, c):
    return (hex_center(*a) + hex_center(*b) + hex_center(*c)) / 3.0


def _add(a, d):
    return (a[0] + d[0], a[1] + d[1])


def explore(coloring: HexColoring, choose: Callable[[tuple[int, int]], int],
            check: bool = True) -> tuple[LatticePath, HexColoring]:
    """Run the interface walk with yellow on the left and blue on the right.

    ``choose(cell)`` is called for each unset hexagon the walk touches and
    must return its colour; the colour is recorded before the walk moves on.
    """
    col = coloring.copy()
    start, end = col.endpoints()
    if start is None or end is None:
        raise DomainError("boundary must have a blue arc and a yellow arc")
    L, R = start
    diff = (R[0] - L[0], R[1] - L[1])
    if diff not in _DIR_INDEX:
        raise DomainError("start hexagons are not adjacent")
    i = _DIR_INDEX[diff]
    if (L, R) == end:
        return LatticePath(np.zeros(0, dtype=complex), np.zeros(0, dtype=np.int8), []), col
    verts = [_centroid(L, R, _add(L, DIRS[(i - 1) % 6]))]
    turns = []
    edges = []
    seen = set()
    max_steps = 6 * (coloring.width + 2) * (coloring.height + 2) + 6
    while (L, R) != end:
        X = _add(L, DIRS[(i + 1) % 6])
        if not col.known(*X):
            raise NumericError(f"walk left the domain at {X}")
        c = col.get(*X)
        if c == UNSET:
            c = int(choose(X))
            if c not in (BLUE, YELLOW):
                raise DomainError("colour must be BLUE or YELLOW")
            col.set(X[0], X[1], c)
        if check:
            assert col.get(*L) == YELLOW and col.get(*R) == BLUE
            key = (L, R)
            assert key not in seen, "directed edge traversed twice"
            seen.add(key)
        edges.append((L, R))
        verts.append(_centroid(L, R, X))
        if c == BLUE:
            R = X
            i = (i + 1) % 6
            turns.append(1)
        else:
            L = X
            i = (i - 1) % 6
            turns.append(-1)
        if len(turns) > max_steps:
            raise NumericError("exploration did not terminate")
    edges.append((L, R))
    verts.append(_centroid(L, R, _add(L, DIRS[(i + 1) % 6])))
    return LatticePath(np.asarray(verts), np.asarray(turns, dtype=np.int8), edges), col


def percolation_explore(domain: HexColoring, seed: int, index: int = 0,
                        p_blue: float = 0.5) -> tuple[LatticePath, HexColoring]:
    """Percolation exploration path; unset hexagons are coloured on demand."""
    n_cells = max(1, domain.width * domain.height)
    flips = coin_flips(stream(seed, index), n_cells, p_blue)
    pos = [0]

    def choose(cell):
        c = BLUE if flips[pos[0]] else YELLOW
        pos[0] += 1
        return c

    return explore(domain, choose)


def reveal_path(coloring: HexColoring) -> LatticePath:
    """Exploration path of a fully revealed colouring (no randomness)."""

    def choose(cell):
        raise DomainError(f"hexagon {cell} is unset")

    return explore(coloring, choose)[0]


def _unset_system(col: HexColoring, dense_max: int = 400):
    """Dirichlet problem on the unset interior hexagons: (A, rhs, cells).

    A is a dense array for up to ``dense_max`` unknowns, sparse otherwise.
    """
    W, H = col.width, col.height
    inner = col.interior()
    cells = np.argwhere(inner == UNSET)
    n = len(cells)
    idx = -np.ones((W + 2, H + 2), dtype=np.int64)
    idx[cells[:, 0] + 1, cells[:, 1] + 1] = np.arange(n)
    rows, cols = [np.arange(n)], [np.arange(n)]
    vals = [np.full(n, 6.0)]
    rhs = np.zeros(n)
    for dq, dr in DIRS:
        nq = cells[:, 0] + dq + 1
        nr = cells[:, 1] + dr + 1
        nb = idx[nq, nr]
        unk = nb >= 0
        rows.append(np.flatnonzero(unk))
        cols.append(nb[unk])
        vals.append(np.full(int(unk.sum()), -1.0))
        c = col.colors[nq[~unk], nr[~unk]]
        if np.any(c == UNSET):
            raise DomainError("an unset hexagon borders a hexagon outside the domain")
        rhs[~unk] += c
    rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    if n <= dense_max:
        A = np.zeros((n, n))
        np.add.at(A, (rows, cols), vals)
    else:
        A = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return A, rhs, cells


def harmonic_values(col: HexColoring, tol: float = 1e-10):
    """Discrete harmonic extension of the colours (blue = 1, yellow = 0).

    Returns a (W, H) array: colour values on coloured hexagons and the
    solution of the Dirichlet problem on unset ones.
    """
    out = col.interior().astype(float)
    A, rhs, cells = _unset_system(col)
    if len(cells) == 0:
        return out
    if isinstance(A, np.ndarray):
        f = np.linalg.solve(A, rhs)
    else:
        f = spsolve(A.tocsc(), rhs)
    resid = float(np.max(np.abs(A @ f - rhs)))
    if not resid <= tol:
        raise NumericError(f"harmonic solve residual {resid:.3e} exceeds {tol:.1e}")
    out[cells[:, 0], cells[:, 1]] = f
    return out


def run_harmonic_explorer(domain: HexColoring, tol: float = 1e-10, seed: int = 0,
                          index: int = 0, record: Sequence[tuple[int, int]] = ()):
    """Harmonic explorer with diagnostics.

    Returns ``(path, coloring, history)`` where ``history[cell]`` lists the
    harmonic value at each recorded interior cell before every colouring
    decision, followed by its value at the end of the run.
    """
    n_cells = max(1, domain.width * domain.height)
    u = uniforms(stream(seed, index), n_cells)
    pos = [0]
    history = {tuple(c): [] for c in record}
    col = domain.copy()

    def choose(cell):
        f = harmonic_values(col, tol)
        for c in history:
            history[c].append(float(f[c]))
        colour = BLUE if u[pos[0]] < f[cell] else YELLOW
        pos[0] += 1
        col.set(cell[0], cell[1], colour)
        return colour

    path, final = explore(domain, choose)
    if history:
        f = harmonic_values(final, tol)
        for c in history:
            history[c].append(float(f[c]))
    return path, final, history


def harmonic_explorer(domain: HexColoring, tol: float = 1e-10, seed: int = 0,
                      index: int = 0) -> LatticePath:
    """Harmonic explorer path: each hexagon met by the walk is made blue with
    probability equal to the discrete harmonic extension of the current
    colours (blue = 1, yellow = 0) evaluated there."""
    return run_harmonic_explorer(domain, tol, seed, index)[0]


# ---------------------------------------------------------------------------
# whole-configuration samplers for crossing and arm events


def rectangle_mask(n_rows: int, n_cols: int):
    """Axial array layout of an offset-row rectangle of hexagons.

    Row ``j`` holds columns ``i = 0..n_cols-1`` with odd rows shifted right
    by half a spacing; the axial coordinate is ``q = i - floor(j/2)``.
    Returns (mask, left, right) boolean arrays indexed ``[r, q - q_min]``.
    """
    j = np.arange(n_rows)[:, None]
    i = np.arange(n_cols)[None, :]
    q = i - j // 2
    q_min = -((n_rows - 1) // 2)
    width = n_cols - q_min
    mask = np.zeros((n_rows, width), dtype=bool)
    left = np.zeros_like(mask)
    right = np.zeros_like(mask)
    rows = np.broadcast_to(j, q.shape)
    mask[rows, q - q_min] = True
    left[np.arange(n_rows), q[:, 0] - q_min] = True
    right[np.arange(n_rows), q[:, -1] - q_min] = True
    return mask, left, right


def random_bits(seed: int, index: int, n: int, p_blue: float = 0.5) -> np.ndarray:
    """n independent colours (True = blue) for one sample."""
    gen = stream(seed, index)
    if p_blue == 0.5:
        words = gen.bit_generator.random_raw((n + 63) // 64)
        bits = np.unpackbits(np.asarray(words, dtype=np.uint64).view(np.uint8))[:n]
        return bits.astype(bool)
    return coin_flips(gen, n, p_blue)


def batch_connected(samples: np.ndarray, source: np.ndarray, target: np.ndarray) -> np.ndarray:
    """For each 2-d boolean sample in ``samples[k]`` decide whether some
    cluster of True sites meets both ``source`` and ``target``."""
    structure = np.zeros((3, 3, 3), dtype=bool)
    structure[1] = HEX_STRUCTURE
    labels, _ = ndimage.label(samples, structure=structure)
    n = samples.shape[0]
    src = labels[:, source]
    dst = labels[:, target]
    src_ids = np.unique(src[src > 0])
    hit = np.isin(dst, src_ids) & (dst > 0)
    return hit.reshape(n, -1).any(axis=1)


def crossing_lattice_shape(aspect_xi: float, lattice_size: int) -> tuple[int, int]:
    """(rows, columns) of the hexagon rectangle approximating the conformal
    rectangle with parameter xi at the given number of rows."""
    from ..conformal import rect_geometry_from_xi

    L = rect_geometry_from_xi(aspect_xi).L
    n_cols = max(1, int(round(L / math.pi * lattice_size * SQRT3 / 2.0)))
    return lattice_size, n_cols


def crossing_events(aspect_xi: float, lattice_size: int, seed: int, start: int,
                    count: int, p_blue: float = 0.5) -> np.ndarray:
    """Left-right blue crossing indicators for samples start..start+count-1."""
    n_rows, n_cols = crossing_lattice_shape(aspect_xi, lattice_size)
    mask, left, right = rectangle_mask(n_rows, n_cols)
    n_sites = n_rows * n_cols
    flat = np.flatnonzero(mask.ravel())
    out = np.empty(count, dtype=bool)
    batch = max(1, min(count, 2_000_000 // mask.size))
    for b0 in range(0, count, batch):
        b1 = min(count, b0 + batch)
        arr = np.zeros((b1 - b0, mask.size), dtype=bool)
        for k in range(b0, b1):
            arr[k - b0, flat] = random_bits(seed, start + k, n_sites, p_blue)
        arr = arr.reshape((b1 - b0,) + mask.shape)
        out[b0:b1] = batch_connected(arr, left, right)
    return out


def crossing_event_rect(aspect_xi: float, lattice_size: int, seed: int,
                        index: int = 0, p_blue: float = 0.5) -> bool:
    """Does a blue cluster join the left and right sides of the hexagon
    rectangle approximating the conformal rectangle with parameter xi?"""
    if lattice_size < 8:
        raise DomainError("lattice_size must be at least 8")
    return bool(crossing_events(aspect_xi, lattice_size, seed, index, 1, p_blue)[0])


def semi_annulus_layout(r_in: float, r_out: float, full_plane: bool = False):
    """Sites of the (semi-)annulus r_in <= |z| <= r_out on the triangular
    lattice, as an axial array with inner/outer boundary layers.

    The half-plane version keeps sites with y >= 0.
    """
    R = int(math.ceil(r_out)) + 1
    qs = np.arange(-2 * R, 2 * R + 1)
    rs = np.arange(-R - 1, R + 2) if full_plane else np.arange(0, R + 2)
    Q, Rr = np.meshgrid(qs, rs)
    z = hex_center(Q, Rr)
    mod = np.abs(z)
    mask = (mod >= r_in) & (mod <= r_out)
    if not full_plane:
        mask &= z.imag >= 0
    inner = mask & (mod < r_in + 1.0)
    outer = mask & (mod > r_out - 1.0)
    return mask, inner, outer


def arm_events(r_in: float, r_out: float, k: int, geometry: str, seed: int,
               start: int, count: int) -> np.ndarray:
    """Indicators of k polychromatic crossings of the (semi-)annulus.

    k = 1: a blue crossing.  k = 2: a blue and a yellow crossing.
    """
    if k not in (1, 2):
        raise DomainError("only k = 1 and k = 2 arm events are implemented")
    full = geometry == "plane"
    mask, inner, outer = semi_annulus_layout(r_in, r_out, full_plane=full)
    flat = np.flatnonzero(mask.ravel())
    out = np.empty(count, dtype=bool)
    batch = max(1, min(count, 2_000_000 // mask.size))
    for b0 in range(0, count, batch):
        b1 = min(count, b0 + batch)
        arr = np.zeros((b1 - b0, mask.size), dtype=bool)
        for j in range(b0, b1):
            arr[j - b0, flat] = random_bits(seed, start + j, len(flat))
        arr = arr.reshape((b1 - b0,) + mask.shape)
        hit = batch_connected(arr, inner, outer)
        if k == 2:
            yellow = (~arr) & mask[None]
            hit &= batch_connected(yellow, inner, outer)
        out[b0:b1] = hit
    return out
