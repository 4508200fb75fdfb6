"""Chordal and radial Loewner evolution with piecewise-constant drivers.

On each grid interval the driver is held at its left-endpoint value, so a
chordal step is exactly the vertical slit map of
:func:`slekit.conformal.slit_forward` with capacity ``2 * dt``.  Time is the
half-plane capacity parameterization: the hull at time ``t`` has capacity
``2t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, UnzipError
from .geometry import first_self_intersection
from .rng import normals, stream, uniforms

CHORDAL = "chordal"
RADIAL = "radial"


@dataclass
class Driver:
    """Driving function sampled on a time grid starting at 0."""

    times: np.ndarray
    values: np.ndarray
    kappa_hint: float | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.ndim != 1 or self.times.shape != self.values.shape:
            raise DomainError("times and values must be 1-d arrays of equal length")
        if len(self.times) < 1 or self.times[0] != 0.0:
            raise DomainError("driver time grid must start at 0")
        if np.any(np.diff(self.times) <= 0):
            raise DomainError("driver times must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("driver values must be finite")

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.times)

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def capacity(self) -> float:
        """Half-plane capacity of the full hull (2 x horizon)."""
        return 2.0 * self.horizon

    def rescaled(self, alpha: float) -> "Driver":
        """Driver t -> alpha**-1/2 U(alpha t) on the rescaled grid."""
        return Driver(self.times / alpha, self.values / math.sqrt(alpha), self.kappa_hint)

    def shifted(self, index: int) -> "Driver":
        """Driver t -> U(t + t_index) - U(t_index)."""
        return Driver(
            self.times[index:] - self.times[index],
            self.values[index:] - self.values[index],
            self.kappa_hint,
        )


@dataclass
class Trace:
    """Polyline gamma(t_k) in the closed upper half-plane or unit disk."""

    times: np.ndarray
    points: np.ndarray
    flavor: str = CHORDAL

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.points = np.asarray(self.points, dtype=complex)
        if self.times.shape != self.points.shape:
            raise DomainError("times and points must have the same length")

    def __len__(self):
        return len(self.points)


class SwallowResult(NamedTuple):
    swallowed: bool
    tau: float
    g_T: complex


def uniform_grid(horizon: float, n_steps: int) -> np.ndarray:
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    if n_steps < 1:
        raise DomainError("need at least one step")
    return horizon * np.arange(n_steps + 1) / n_steps


def sample_driver(kappa: float, horizon: float = 1.0, n_steps: int = 1000,
                  seed: int = 0, index: int = 0, times=None) -> Driver:
    """sqrt(kappa) times a Brownian path on a uniform (or given) time grid.

    ``index`` selects the sample stream, so the pair (seed, index) fully
    determines the driver.
    """
    if kappa < 0:
        raise DomainError("kappa must be non-negative")
    if times is None:
        times = uniform_grid(horizon, n_steps)
    else:
        times = np.asarray(times, dtype=float)
    dt = np.diff(times)
    values = np.zeros(len(times))
    if kappa > 0:
        incr = normals(stream(seed, index), len(dt)) * np.sqrt(dt)
        values[1:] = math.sqrt(kappa) * np.cumsum(incr)
    return Driver(times, values, kappa)


def driver_from_function(f, horizon: float, n_steps: int) -> Driver:
    """Sample a deterministic driver ``f(t)`` on a uniform grid."""
    times = uniform_grid(horizon, n_steps)
    return Driver(times, np.array([f(t) for t in times], dtype=float))


def geometric_grid(t_min: float, t_max: float, n_steps: int) -> np.ndarray:
    """Time grid 0, t_min, ..., t_max with geometrically growing steps."""
    inner = np.geomspace(t_min, t_max, n_steps)
    return np.concatenate([[0.0], inner])


def chordal_trace(d: Driver, tip_eps: float = 0.0) -> Trace:
    """Chordal trace for driver ``d``; O(n^2) in the number of steps.

    With ``tip_eps = 0`` the point ``gamma(t_{k+1})`` is the preimage of the
    driver under the first k+1 slit maps, i.e. the tip of the newest slit.
    A positive ``tip_eps`` evaluates the preimage of ``U_k + i tip_eps``.
    """
    if tip_eps < 0:
        raise DomainError("tip_eps must be non-negative")
    xs, ys = _kernels.chordal_trace_kernel(d.values, d.dt, float(tip_eps))
    return Trace(d.times.copy(), xs + 1j * ys, CHORDAL)


def evolve_point(d: Driver, z, min_im: float = 1e-9,
                 horizon: float | None = None,
                 resolution: float = 0.0) -> SwallowResult:
    """Follow g_t(z) through the slit steps of ``d`` up to ``horizon``.

    The point is declared swallowed when its distance to the driver drops
    below ``max(min_im, resolution * sqrt(dt))`` (closest approach within a
    step is exact).  Pockets of a discrete hull never close completely, so
    a positive ``resolution`` treats near-misses at the slit scale as
    swallowing.  Points on (or pressed onto) the real line are swallowed
    when the driver passes over them.
    """
    z = complex(z)
    if z.imag < 0:
        raise DomainError("point must lie in the closed upper half-plane")
    if z.imag == 0 and z.real == d.values[0]:
        raise DomainError("the starting point of the trace is in every hull")
    stop = d.n_steps if horizon is None else int(np.searchsorted(d.times, horizon, side="right")) - 1
    stop = max(0, min(stop, d.n_steps))
    swallowed, j, s, x, y = _kernels.evolve_point_kernel(
        d.values, d.dt, z.real, z.imag, float(min_im), float(resolution), stop)
    if swallowed:
        return SwallowResult(True, float(d.times[j] + s), complex(x, y))
    return SwallowResult(False, math.inf, complex(x, y))


class BridgeResult(NamedTuple):
    swallowed: bool
    tau: float
    g_T: complex
    side: int
    refinements: int


def evolve_point_bridge(d: Driver, z, seed: int, index: int = 0, eps: float = 0.1,
                        max_depth: int = 40, min_dist: float = 1e-12) -> BridgeResult:
    """Follow g_t(z) with the driver refined near the point.

    ``d`` must be a Brownian driver produced by :func:`sample_driver` with
    the same (seed, index); midpoints of coarse steps are drawn from the
    Brownian bridge using the normals that follow the driver's own draws in
    that stream, so the refined path is a refinement of ``d``.
    ``side`` is +1 when z ends up (or is swallowed) to the right of the
    driver and -1 otherwise.
    """
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("point must lie in the open upper half-plane")
    kappa = d.kappa_hint
    if kappa is None:
        raise DomainError("driver must carry its kappa")
    n = max(1024, 4 * d.n_steps)
    while True:
        gen = stream(seed, index)
        normals(gen, d.n_steps)
        pool = normals(gen, n)
        status, j, s, x, y, side, used = _kernels.evolve_point_bridge_kernel(
            d.values, d.dt, z.real, z.imag, float(kappa), float(eps), int(max_depth),
            float(min_dist), pool)
        if status >= 0:
            break
        n *= 4
    sgn = 1 if side > 0 else -1
    if status == 1:
        return BridgeResult(True, float(d.times[j] + s), complex(x, y), sgn, int(used))
    return BridgeResult(False, math.inf, complex(x, y), sgn, int(used))


def map_forward(d: Driver, z, index: int | None = None):
    """g_{t_index}(z) for an array of points (default: full horizon)."""
    stop = d.n_steps if index is None else index
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    xs, ys = _kernels.forward_map_kernel(d.values, d.dt, z.real.copy(), z.imag.copy(), stop)
    return xs + 1j * ys


def map_inverse(d: Driver, w, index: int | None = None):
    """g_{t_index}^{-1}(w) for an array of points."""
    stop = d.n_steps if index is None else index
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    xs, ys = _kernels.inverse_map_kernel(d.values, d.dt, w.real.copy(), w.imag.copy(), stop)
    return xs + 1j * ys


def extract_driving(path: Trace | Sequence[complex], max_dcap_fraction: float = 1e-3,
                    min_gap: int = 4) -> Driver:
    """Recover the driving function of a simple polyline by unzipping.

    Each vertex is taken as the tip of a vertical slit in the current mapped
    domain and removed with the corresponding slit map.  A first pass gives
    the total capacity; the second pass splits steps so that no step carries
    more than ``max_dcap_fraction`` of it.

    Raises UnzipError (a DomainError) carrying the index of the first
    vertex that the maps push out of the open half-plane, or the end vertex
    of the first segment crossing an earlier one.  Crossings between
    segments fewer than ``min_gap`` steps apart are ignored: traces from
    piecewise-constant drivers have them at the scale of a single step.
    """
    pts = path.points if isinstance(path, Trace) else np.asarray(path, dtype=complex)
    pts = np.asarray(pts, dtype=complex)
    if len(pts) < 2:
        raise DomainError("need at least two vertices")
    if np.any(pts.imag < 0):
        raise UnzipError("path leaves the upper half-plane", int(np.argmax(pts.imag < 0)))
    if pts[0].imag != 0:
        raise DomainError("path must start on the real line")
    j = first_self_intersection(pts, min_gap)
    if j >= 0:
        raise UnzipError(f"segment {j} crosses an earlier segment", j + 1)
    xs = pts.real.copy()
    ys = pts.imag.copy()
    us, dts, status, idx = _kernels.unzip_kernel(xs, ys, math.inf)
    if status != 0:
        raise UnzipError(f"vertex {idx} left the half-plane while unzipping", int(idx))
    total = 2.0 * math.fsum(dts)
    if total == 0:
        raise DomainError("path has zero capacity")
    us, dts, status, idx = _kernels.unzip_kernel(xs, ys, max_dcap_fraction * total)
    if status != 0:
        raise UnzipError(f"vertex {idx} left the half-plane while unzipping", int(idx))
    dts = np.asarray(dts)
    us = np.asarray(us)
    times = np.concatenate([[0.0], np.cumsum(dts)])
    values = np.concatenate([us, us[-1:]])
    return Driver(times, values)


def radial_trace(kappa: float, horizon: float = 1.0, n_steps: int = 1000,
                 seed: int = 0, index: int = 0, rotate: bool = False) -> Trace:
    """Radial trace from a boundary point toward 0 in the unit disk.

    The driver is W_t = exp(i sqrt(kappa) B_t) (times a uniform rotation if
    ``rotate``), normalized so that g_t'(0) = exp(t).
    """
    d = sample_driver(kappa, horizon, n_steps, seed, index)
    theta = d.values.copy()
    if rotate:
        gen = stream(seed, index)
        normals(gen, n_steps)  # the draws already used by the driver
        theta += 2 * math.pi * float(uniforms(gen, 1)[0])
    return radial_trace_from_angles(d.times, theta)


def radial_trace_from_angles(times, theta) -> Trace:
    times = np.asarray(times, dtype=float)
    theta = np.asarray(theta, dtype=float)
    xs, ys = _kernels.radial_trace_kernel(theta, np.diff(times))
    return Trace(times, xs + 1j * ys, RADIAL)


def radial_evolve_point(times, theta, z, index: int | None = None) -> complex:
    """g_t(z) for the radial equation driven by exp(i theta)."""
    times = np.asarray(times, dtype=float)
    theta = np.asarray(theta, dtype=float)
    stop = len(times) - 1 if index is None else index
    z = complex(z)
    gr, gi = _kernels.radial_forward_kernel(theta, np.diff(times), z.real, z.imag, stop)
    return complex(gr, gi)
