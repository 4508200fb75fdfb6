"""Monte Carlo estimators and verification experiments.

Every sample draws from its own counter-based stream ``(seed, index)``, and
moments are accumulated in exact rational arithmetic, so results do not
depend on how samples are split across workers.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from . import formulas
from .conformal import restriction_derivative_halfdisk
from .discrete import hexlattice
from .discrete.graphs import LatticeGraph, grid_graph, lerw, spanning_tree_count, wilson_ust
from .errors import DomainError
from .geometry import box_counts, polyline_hits_disk
from .loewner import (Driver, Trace, chordal_trace, evolve_point_bridge, extract_driving,
                      geometric_grid, sample_driver)
from .rng import stream, uniforms


# ---------------------------------------------------------------------------
# estimates


@dataclass(frozen=True)
class Moments:
    """Exact (n, mean, M2) triple; merging is associative and commutative."""

    n: int = 0
    mean: Fraction = Fraction(0)
    m2: Fraction = Fraction(0)

    @classmethod
    def of(cls, values: Iterable[float]) -> "Moments":
        xs = [Fraction(float(v)) for v in values]
        n = len(xs)
        if n == 0:
            return cls()
        mean = sum(xs, Fraction(0)) / n
        return cls(n, mean, sum(((x - mean) ** 2 for x in xs), Fraction(0)))

    def merge(self, other: "Moments") -> "Moments":
        if self.n == 0:
            return other
        if other.n == 0:
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return Moments(n, mean, m2)

    def estimate(self) -> "Estimate":
        if self.n == 0:
            raise DomainError("no samples")
        if self.n < 2:
            return Estimate(float(self.mean), 0.0, self.n)
        var = self.m2 / (self.n - 1)
        return Estimate(float(self.mean), math.sqrt(float(var) / self.n), self.n)


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_err: float
    n: int

    def __post_init__(self):
        if not self.std_err >= 0:
            raise DomainError("standard error must be non-negative")

    @classmethod
    def from_samples(cls, values) -> "Estimate":
        return Moments.of(values).estimate()


@dataclass
class VerificationReport:
    name: str
    exact_value: float
    estimate: Estimate
    discretization_allowance: float
    seed: int
    runtime_s: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def z_score(self) -> float:
        diff = self.estimate.mean - self.exact_value
        if self.estimate.std_err > 0:
            return diff / self.estimate.std_err
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)

    @property
    def passed(self) -> bool:
        diff = abs(self.estimate.mean - self.exact_value)
        return diff <= 3.0 * self.estimate.std_err + self.discretization_allowance

    def record(self, timing: bool = False) -> dict:
        """JSON-ready dict with the fixed report fields."""
        z = self.z_score
        return {
            "name": self.name,
            "exact": self.exact_value,
            "mean": self.estimate.mean,
            "std_err": self.estimate.std_err,
            "n": self.estimate.n,
            "z": z if math.isfinite(z) else None,
            "allowance": self.discretization_allowance,
            "pass": self.passed,
            "seed": self.seed,
            "runtime_s": self.runtime_s if timing else None,
        }


# ---------------------------------------------------------------------------
# sample scheduling


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("SLE_KIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError("SLE_KIT_THREADS must be an integer") from None
    return max(1, min(8, os.cpu_count() or 1))


def map_samples(fn: Callable[[int], object], n: int, workers: int | None = None,
                chunk: int = 256) -> list:
    """[fn(0), ..., fn(n-1)] computed on a thread pool, in index order."""
    w = worker_count(workers)
    if w == 1 or n <= chunk:
        return [fn(k) for k in range(n)]
    blocks = [range(a, min(n, a + chunk)) for a in range(0, n, chunk)]
    with ThreadPoolExecutor(max_workers=w) as pool:
        parts = pool.map(lambda r: [fn(k) for k in r], blocks)
        return [x for part in parts for x in part]


def _timed(fn):
    t0 = time.perf_counter()
    rep = fn()
    rep.runtime_s = time.perf_counter() - t0
    return rep


def _binomial_estimate(hits) -> Estimate:
    return Moments.of(np.asarray(hits, dtype=float)).estimate()


# ---------------------------------------------------------------------------
# left passage


def left_passage_sample(kappa: float, z0: complex, n_steps: int, seed: int, index: int,
                        horizon_factor: float = 1e4, eps: float = 0.1,
                        resolve_angle: float = 0.05):
    """Classify one trace: +1 passes left of z0, 0 passes right, None unresolved.

    The point z0 is pushed through the Loewner flow of a Brownian driver on a
    geometric time grid reaching ``horizon_factor * |z0|**2``; steps that are
    coarse relative to the distance between g_t(z0) and the driver are
    refined along the Brownian bridge.  The trace passes to the left of z0
    exactly when g_t(z0) ends up to the right of the driver.
    """
    s2 = abs(z0) ** 2
    times = geometric_grid(1e-4 * s2, horizon_factor * s2, n_steps)
    d = sample_driver(kappa, times=times, seed=seed, index=index)
    r = evolve_point_bridge(d, z0, seed, index, eps=eps)
    if not r.swallowed:
        w = r.g_T - d.values[-1]
        if math.atan2(w.imag, abs(w.real)) > resolve_angle:
            return None
    return 1 if r.side > 0 else 0


def verify_left_passage(kappa: float, z0: complex, n_samples: int = 10_000,
                        n_steps: int = 4000, seed: int = 0, allowance: float = 0.02,
                        workers: int | None = None, name: str | None = None) -> VerificationReport:
    z0 = complex(z0)
    if not 0 < kappa < 8:
        raise DomainError("kappa must lie in (0, 8)")
    if z0.imag <= 0:
        raise DomainError("z0 must lie in the upper half-plane")

    def run():
        res = map_samples(lambda k: left_passage_sample(kappa, z0, n_steps, seed, k),
                          n_samples, workers)
        kept = [r for r in res if r is not None]
        exact = formulas.left_passage(z0.real, z0.imag, kappa)
        return VerificationReport(
            name or f"left-passage kappa={kappa:g} z0={z0.real:g}{z0.imag:+g}i",
            exact, _binomial_estimate(kept), allowance, seed,
            details={"discarded": len(res) - len(kept), "n_steps": n_steps})

    return _timed(run)


# ---------------------------------------------------------------------------
# Cardy crossing


def richardson(sizes: Sequence[int], estimates: Sequence[Estimate]) -> Estimate:
    """Weighted fit p(N) = p_inf + a / N; returns p_inf with its std error."""
    sizes = np.asarray(sizes, dtype=float)
    means = np.array([e.mean for e in estimates])
    ses = np.array([e.std_err for e in estimates])
    n_total = int(sum(e.n for e in estimates))
    if len(sizes) == 1:
        return Estimate(float(means[0]), float(ses[0]), n_total)
    if np.all(ses == 0):
        if np.all(means == means[0]):
            return Estimate(float(means[0]), 0.0, n_total)
        ses = np.full_like(ses, 1e-12)
    ses = np.maximum(ses, 1e-12)
    A = np.stack([np.ones_like(sizes), 1.0 / sizes], axis=1)
    W = 1.0 / ses**2
    cov = np.linalg.inv(A.T @ (A * W[:, None]))
    coef = cov @ (A.T @ (W * means))
    return Estimate(float(coef[0]), float(math.sqrt(cov[0, 0])), n_total)


def crossing_frequency(xi: float, lattice_size: int, n_samples: int, seed: int,
                       offset: int = 0, p_blue: float = 0.5,
                       workers: int | None = None) -> Estimate:
    chunk = 500
    starts = list(range(0, n_samples, chunk))

    def block(a):
        return hexlattice.crossing_events(xi, lattice_size, seed, offset + a,
                                          min(chunk, n_samples - a), p_blue)

    w = worker_count(workers)
    if w == 1 or len(starts) == 1:
        parts = [block(a) for a in starts]
    else:
        with ThreadPoolExecutor(max_workers=w) as pool:
            parts = list(pool.map(block, starts))
    return _binomial_estimate(np.concatenate(parts))


def verify_cardy(xi: float, lattice_sizes: Sequence[int] = (64, 128, 256),
                 n_samples: int = 10_000, seed: int = 0, allowance: float = 0.02,
                 p_blue: float = 0.5, workers: int | None = None,
                 name: str | None = None) -> VerificationReport:
    """Crossing frequencies at several sizes, extrapolated in 1/N."""

    def run():
        ests = [crossing_frequency(xi, N, n_samples, seed, offset=j * n_samples,
                                   p_blue=p_blue, workers=workers)
                for j, N in enumerate(lattice_sizes)]
        est = richardson(lattice_sizes, ests)
        return VerificationReport(
            name or f"cardy xi={xi:g}", formulas.cardy_crossing(xi, 6.0), est, allowance, seed,
            details={"sizes": list(lattice_sizes), "per_size": [e.mean for e in ests]})

    return _timed(run)


# ---------------------------------------------------------------------------
# restriction


def restriction_sample(x0: float, r: float, n_steps: int, seed: int, index: int,
                       escape_factor: float = 10.0) -> tuple[int, bool]:
    """(avoided, escaped) for one SLE_{8/3} trace and the half-disk B(x0, r).

    The horizon is ``escape_factor**2 * x0**2`` so the typical trace ends
    well beyond radius ``escape_factor * |x0|``.
    """
    T = (escape_factor * x0) ** 2
    times = geometric_grid(1e-4 * r * r, T, n_steps)
    d = sample_driver(8.0 / 3.0, times=times, seed=seed, index=index)
    pts = chordal_trace(d).points
    avoided = not polyline_hits_disk(pts, complex(x0), r)
    return int(avoided), bool(abs(pts[-1]) >= escape_factor * abs(x0))


def verify_restriction(x0: float = 2.0, r: float = 1.0, n_samples: int = 5000,
                       n_steps: int = 2000, seed: int = 0, allowance: float = 0.03,
                       workers: int | None = None, name: str | None = None) -> VerificationReport:
    exact = formulas.restriction_prob(restriction_derivative_halfdisk(x0, r))

    def run():
        res = map_samples(lambda k: restriction_sample(x0, r, n_steps, seed, k), n_samples,
                          workers, chunk=64)
        est = _binomial_estimate([a for a, _ in res])
        return VerificationReport(
            name or f"restriction x0={x0:g} r={r:g}", exact, est, allowance, seed,
            details={"escaped_fraction": float(np.mean([e for _, e in res]))})

    return _timed(run)


# ---------------------------------------------------------------------------
# arm exponents


def regression_slope(x, y, sigma=None) -> Estimate:
    """(Weighted) least-squares slope with its standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise DomainError("need at least two points for a slope")
    A = np.stack([np.ones_like(x), x], axis=1)
    if sigma is not None:
        w = 1.0 / np.maximum(np.asarray(sigma, dtype=float), 1e-300) ** 2
        cov = np.linalg.inv(A.T @ (A * w[:, None]))
        coef = cov @ (A.T @ (w * y))
        se = math.sqrt(cov[1, 1])
    else:
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        if len(x) > 2:
            resid = y - A @ coef
            s2 = float(resid @ resid) / (len(x) - 2)
            se = math.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
        else:
            se = 0.0
    return Estimate(float(coef[1]), float(se), len(x))


def arm_frequency(r_in: float, R: float, k: int, geometry: str, n_samples: int,
                  seed: int, offset: int = 0) -> Estimate:
    """Frequency of the k-arm event between radii r_in and R."""
    if R <= r_in:
        return Estimate(1.0, 0.0, n_samples)
    chunk = 1000
    hits = [hexlattice.arm_events(r_in, R, k, geometry, seed, offset + a,
                                  min(chunk, n_samples - a))
            for a in range(0, n_samples, chunk)]
    return _binomial_estimate(np.concatenate(hits))


def estimate_arm_exponent(radii: Sequence[float], n_samples: int = 10_000,
                          geometry: str = formulas.HALF_PLANE, seed: int = 0,
                          k: int | None = None, r_in: float = 2.0) -> Estimate:
    """Slope of log(arm-event frequency) against log R.

    Defaults: one arm (blue) in the half-plane, two arms (blue and yellow)
    in the plane.  The inner radius is fixed at ``r_in`` lattice spacings.
    """
    if k is None:
        k = 1 if geometry == formulas.HALF_PLANE else 2
    freqs = [arm_frequency(r_in, R, k, geometry, n_samples, seed, offset=j * n_samples)
             for j, R in enumerate(radii)]
    f = np.array([e.mean for e in freqs])
    if np.any(f <= 0):
        raise DomainError("an arm event was never observed; increase n_samples")
    sig = np.array([max(e.std_err, 1e-12) for e in freqs]) / f
    est = regression_slope(np.log(radii), np.log(f), sig)
    return Estimate(est.mean, est.std_err, n_samples * len(radii))


# ---------------------------------------------------------------------------
# dimensions and diffusivities


def box_counting_dim(trace, scales: Sequence[float]) -> Estimate:
    """Least-squares slope of log(box count) against log(1/scale)."""
    pts = trace.points if isinstance(trace, Trace) else np.asarray(trace, dtype=complex)
    scales = np.asarray(scales, dtype=float)
    if np.any(scales <= 0):
        raise DomainError("scales must be positive")
    counts = box_counts(pts, scales)
    return regression_slope(np.log(1.0 / scales), np.log(counts))


def _as_driver(p) -> Driver:
    if isinstance(p, Driver):
        return p
    return extract_driving(p)


def driving_diffusivity(paths: Sequence, window: tuple[float, float] = (0.02, 0.2),
                        n_grid: int = 2000, n_boot: int = 200, seed: int = 0) -> Estimate:
    """kappa-hat from the growth of Var[U(t + s) - U(t)] with the lag s.

    Each path (Trace, point sequence or Driver) is unzipped to its driving
    function, sampled on a common grid up to the smallest total capacity
    time T, and squared increments are pooled over paths and start times.
    The slope of the mean squared increment against the lag, for lags in
    ``window`` (fractions of T), is the estimate; its standard error comes
    from a bootstrap over paths.
    """
    drivers = [_as_driver(p) for p in paths]
    if len(drivers) < 2:
        raise DomainError("need at least two paths")
    T = min(d.horizon for d in drivers)
    h = T / n_grid
    grid = np.arange(n_grid + 1) * h
    U = np.array([d.values[np.clip(np.searchsorted(d.times, grid, side="right") - 1, 0, None)]
                  for d in drivers])
    lo = max(1, int(round(window[0] * n_grid)))
    hi = max(lo + 1, int(round(window[1] * n_grid)))
    lags = np.unique(np.geomspace(lo, hi, 12).astype(int))

    def slope(Us):
        v = [np.mean((Us[:, m:] - Us[:, :-m]) ** 2) for m in lags]
        return float(np.polyfit(lags * h, v, 1)[0])

    est = slope(U)
    idx = (uniforms(stream(seed, 0), (n_boot, len(drivers))) * len(drivers)).astype(int)
    boots = [slope(U[row]) for row in idx]
    return Estimate(est, float(np.std(boots, ddof=1)), len(drivers))


def _boundary_frame(z: np.ndarray, size: int, r_max: float) -> np.ndarray:
    """Rotate a path starting on the boundary of [0, size-1]^2 so that it
    starts at 0 and enters the upper half-plane; cut it at radius r_max."""
    b = z[0]
    if b.imag == 0:
        w = z - b
    elif b.imag == size - 1:
        w = -(z - b)
    elif b.real == 0:
        w = (z - b) * 1j
    else:
        w = (z - b) * -1j
    w = np.round(w.real) + 1j * np.round(w.imag)
    far = np.flatnonzero(np.abs(w) > r_max)
    return w[: far[0] + 1] if len(far) else w


def lerw_paths(grid_size: int = 200, n_paths: int = 200, seed: int = 0,
               r_max_fraction: float = 0.3) -> list[np.ndarray]:
    """Time-reversed LERW from the centre of a square grid to its boundary,
    each rotated so that its boundary end sits at 0 on the real line."""
    N = grid_size
    g = grid_graph(N, N)
    V = [v for v in range(N * N) if v % N in (0, N - 1) or v // N in (0, N - 1)]
    u = N // 2 + N * (N // 2)
    out = []
    for k in range(n_paths):
        p = lerw(g, u, V, seed, k)
        out.append(_boundary_frame(g.coords[p][::-1], N, r_max_fraction * N))
    return out


def lerw_diffusivity(grid_size: int = 200, n_paths: int = 200, seed: int = 0) -> Estimate:
    return driving_diffusivity(lerw_paths(grid_size, n_paths, seed), seed=seed)


# ---------------------------------------------------------------------------
# spanning trees


def ust_counts(g: LatticeGraph, n_samples: int, seed: int = 0) -> dict:
    """Counts of each spanning tree (as an edge set) over Wilson samples."""
    counts: dict = {}
    for k in range(n_samples):
        t = wilson_ust(g, seed, k)
        key = t.edge_set()
        counts[key] = counts.get(key, 0) + 1
    return counts


def ust_chi_square(g: LatticeGraph, n_samples: int, seed: int = 0):
    """(chi2, p-value, number of distinct trees seen, matrix-tree count)."""
    counts = ust_counts(g, n_samples, seed)
    total = spanning_tree_count(g)
    obs = np.array(list(counts.values()) + [0] * (total - len(counts)), dtype=float)
    res = stats.chisquare(obs)
    return float(res.statistic), float(res.pvalue), len(counts), total


def verify_ust_uniform(g: LatticeGraph, n_samples: int, seed: int = 0,
                       name: str = "ust") -> VerificationReport:
    """Frequency of the most common tree against 1 / (number of trees)."""

    def run():
        counts = ust_counts(g, n_samples, seed)
        total = spanning_tree_count(g)
        key = min(counts, key=sorted)  # fixed tree, independent of the sample
        hits = np.zeros(n_samples)
        hits[: counts[key]] = 1.0
        return VerificationReport(name, 1.0 / total, _binomial_estimate(hits), 0.0, seed,
                                  details={"distinct": len(counts), "trees": total})

    return _timed(run)


# ---------------------------------------------------------------------------
# suites


def default_suite(seed: int = 0, quick: bool = False, workers: int | None = None,
                  include_dimension: bool = True) -> list[VerificationReport]:
    """The verification experiments with their default parameters.

    The quick variant uses small sample sizes and lattices and omits the
    box-counting check (whose estimator is biased at the scales reachable
    quickly).
    """
    from .discrete.graphs import cycle_graph

    if quick:
        lp = dict(n_samples=2000, n_steps=1000)
        reps = [
            verify_left_passage(4.0, 1 + 1j, seed=seed, workers=workers, **lp),
            verify_left_passage(6.0, -1 + 1j, seed=seed, workers=workers, **lp),
            verify_cardy(0.5, (32, 64), n_samples=2000, seed=seed, workers=workers),
            verify_cardy(0.3, (32, 64), n_samples=2000, seed=seed, workers=workers),
            verify_restriction(2.0, 1.0, n_samples=400, n_steps=2000, seed=seed, workers=workers),
            verify_ust_uniform(cycle_graph(4), 4000, seed, name="ust C4"),
        ]
        return reps
    reps = [
        verify_left_passage(4.0, 1 + 1j, seed=seed, workers=workers),
        verify_left_passage(6.0, -1 + 1j, seed=seed, workers=workers),
        verify_left_passage(6.0, 1j, seed=seed, workers=workers),
        verify_cardy(0.5, seed=seed, workers=workers),
        verify_cardy(0.3, seed=seed, workers=workers),
        verify_restriction(2.0, 1.0, seed=seed, workers=workers),
        verify_restriction(-2.0, 1.0, seed=seed, workers=workers),
        verify_ust_uniform(cycle_graph(4), 100_000, seed, name="ust C4"),
        verify_ust_uniform(grid_graph(3, 2), 100_000, seed, name="ust grid 2x3"),
    ]
    t0 = time.perf_counter()
    arm = estimate_arm_exponent([16, 32, 64, 128], 10_000, seed=seed)
    reps.append(VerificationReport("arm half-plane k=1 slope", -1.0 / 3.0, arm, 0.08, seed,
                                   time.perf_counter() - t0))
    if include_dimension:
        t0 = time.perf_counter()
        d = sample_driver(6.0, 1.0, 100_000, seed=seed)
        dim = box_counting_dim(chordal_trace(d), 2.0 ** -np.arange(3, 8))
        reps.append(VerificationReport("box dimension kappa=6", 1.75, dim, 0.1, seed,
                                       time.perf_counter() - t0))
    return reps
