"""Polyline geometry: self-intersection, winding, hull hits, box counting."""

from __future__ import annotations

import math

import numba
import numpy as np

from .errors import DomainError


@numba.njit(cache=True, inline="always")
def _orient(ax, ay, bx, by, cx, cy):
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


@numba.njit(cache=True, inline="always")
def _on_segment(ax, ay, bx, by, cx, cy):
    # c collinear with ab: is it inside the bounding box?
    return min(ax, bx) <= cx <= max(ax, bx) and min(ay, by) <= cy <= max(ay, by)


@numba.njit(cache=True)
def segments_intersect(ax, ay, bx, by, cx, cy, dx, dy):
    """Closed segments ab and cd share a point."""
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if o2 == 0 and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    if o3 == 0 and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if o4 == 0 and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    return False


@numba.njit(cache=True)
def _first_self_intersection(xs, ys, min_gap):
    n = xs.shape[0] - 1
    lox = np.minimum(xs[:-1], xs[1:])
    hix = np.maximum(xs[:-1], xs[1:])
    loy = np.minimum(ys[:-1], ys[1:])
    hiy = np.maximum(ys[:-1], ys[1:])
    for j in range(n):
        for i in range(j - max(min_gap, 2) + 1):
            if hix[i] < lox[j] or hix[j] < lox[i] or hiy[i] < loy[j] or hiy[j] < loy[i]:
                continue
            if segments_intersect(xs[i], ys[i], xs[i + 1], ys[i + 1],
                                  xs[j], ys[j], xs[j + 1], ys[j + 1]):
                return j
        # adjacent segment: only a fold-back (overlap) counts
        if j >= 1 and min_gap <= 1:
            i = j - 1
            if _orient(xs[i], ys[i], xs[j], ys[j], xs[j + 1], ys[j + 1]) == 0:
                ux = xs[j] - xs[i]
                uy = ys[j] - ys[i]
                vx = xs[j + 1] - xs[j]
                vy = ys[j + 1] - ys[j]
                if ux * vx + uy * vy < 0:
                    return j
    return -1


def first_self_intersection(points, min_gap: int = 1) -> int:
    """Index of the first segment that meets an earlier one, or -1.

    Segment ``j`` joins vertices ``j`` and ``j + 1``; consecutive segments
    only count as intersecting when the path folds back on itself.  With
    ``min_gap > 1`` pairs of segments fewer than ``min_gap`` indices apart
    are ignored, which drops crossings below the resolution of the chords.
    Quadratic time with bounding-box rejection.
    """
    pts = np.asarray(points, dtype=complex)
    if min_gap < 1:
        raise DomainError("min_gap must be at least 1")
    if len(pts) < 3:
        return -1
    return int(_first_self_intersection(pts.real.copy(), pts.imag.copy(), int(min_gap)))


def is_simple(points, min_gap: int = 1) -> bool:
    return first_self_intersection(points, min_gap) < 0


def winding_number(points, z0: complex) -> int:
    """Winding number of the closed polygon through ``points`` around z0."""
    pts = np.asarray(points, dtype=complex) - complex(z0)
    if np.any(pts == 0):
        raise DomainError("polygon passes through the point")
    closed = np.append(pts, pts[:1])
    turns = np.angle(closed[1:] / closed[:-1])
    return int(round(float(np.sum(turns)) / (2 * math.pi)))


def passes_left(points, z0: complex, far: float | None = None) -> bool:
    """Does the chordal path pass to the left of z0?

    The path (from the real line toward infinity) is closed by a straight
    segment from its last point to a far point on the positive real axis,
    then back along the axis to the start.  z0 lies to the right of the
    path exactly when this loop winds around it (clockwise).
    """
    pts = np.asarray(points, dtype=complex)
    z0 = complex(z0)
    if far is None:
        far = 4.0 * max(float(np.max(np.abs(pts))), abs(z0), 1.0)
    loop = np.concatenate([pts, [complex(far, 0.0)]])
    return winding_number(loop, z0) != 0


def polyline_hits_disk(points, center: complex, r: float) -> bool:
    """Does any segment of the polyline meet the closed disk |z - c| <= r?"""
    pts = np.asarray(points, dtype=complex) - complex(center)
    if len(pts) == 1:
        return bool(abs(pts[0]) <= r)
    a = pts[:-1]
    d = pts[1:] - a
    dd = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0, -np.real(a * np.conj(d)) / dd, 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = np.abs(a + t * d)
    return bool(np.any(closest <= r))


def densify(points, spacing: float) -> np.ndarray:
    """Insert points along each segment so consecutive gaps are <= spacing."""
    pts = np.asarray(points, dtype=complex)
    if len(pts) < 2:
        return pts.copy()
    seg = np.abs(np.diff(pts))
    counts = np.maximum(1, np.ceil(seg / spacing).astype(np.int64))
    starts = np.repeat(pts[:-1], counts)
    deltas = np.repeat(np.diff(pts) / counts, counts)
    first = np.cumsum(counts) - counts
    offsets = np.arange(int(counts.sum())) - np.repeat(first, counts) + 1
    out = [pts[:1], starts + deltas * offsets]
    return np.concatenate(out)


def box_counts(points, scales) -> np.ndarray:
    """Number of grid boxes of each side length met by the polyline."""
    counts = []
    for eps in scales:
        dense = densify(points, eps / 2.0)
        ix = np.floor(dense.real / eps).astype(np.int64)
        iy = np.floor(dense.imag / eps).astype(np.int64)
        counts.append(len(np.unique(np.stack([ix, iy], axis=1), axis=0)))
    return np.asarray(counts)
