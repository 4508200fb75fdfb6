"""Compiled inner loops for the Loewner engine.

Complex numbers are carried as (re, im) float pairs: the square root of the
slit maps is done in real arithmetic, which numba vectorizes far better
than complex ``sqrt``.
"""

import math

import numba
import numpy as np


@numba.njit(cache=True, inline="always")
def _shifted_root(dx, dy, c):
    """Root of (dx + i dy)**2 + c in the closed upper half-plane.

    The real part carries the sign of ``dx`` (continuous branch off the slit).
    """
    re = dx * dx - dy * dy + c
    im = 2.0 * dx * dy
    r = math.sqrt(re * re + im * im)
    s = math.sqrt(0.5 * (r + abs(re)))
    if s == 0.0:
        return 0.0, 0.0
    if re >= 0.0:
        wr = s
        wi = abs(im) / (2.0 * s)
    else:
        wr = abs(im) / (2.0 * s)
        wi = s
    return math.copysign(wr, dx), wi


@numba.njit(cache=True)
def chordal_trace_kernel(U, dt, tip_eps):
    """Trace points gamma(t_k) for a piecewise-constant driver.

    gamma(t_{k+1}) = f_0^{-1} o ... o f_k^{-1}(U_k + i tip_eps) where f_j is
    the vertical-slit step with base U_j and duration dt_j.  The loop over
    the already-placed points is innermost: those updates are independent.
    """
    n = dt.shape[0]
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    xs[0] = U[0]
    ys[0] = 0.0
    for k in range(n):
        xs[k + 1] = U[k]
        ys[k + 1] = math.sqrt(tip_eps * tip_eps + 4.0 * dt[k])
    for j in range(n - 1, -1, -1):
        u = U[j]
        c = -4.0 * dt[j]
        for k in range(j + 2, n + 1):
            wr, wi = _shifted_root(xs[k] - u, ys[k], c)
            xs[k] = u + wr
            ys[k] = wi
    return xs, ys


@numba.njit(cache=True)
def evolve_point_kernel(U, dt, x, y, min_im, resolution, stop_index):
    """Push the point x + iy through the first ``stop_index`` slit steps.

    Returns (swallowed, step index, time offset within the step, x, y).
    Within a step the flow is (g - U)**2 = (z - U)**2 + 4s, so the closest
    approach to the driver is found in closed form.  The point is swallowed
    when that approach is below ``min_im`` or below ``resolution * sqrt(dt)``
    (a discrete hull closes only up to its slit width), or when its image
    has Im <= min_im and the next driver value jumps past it.
    """
    for j in range(stop_index):
        u = U[j]
        dx = x - u
        a = dx * dx - y * y
        b = 2.0 * dx * y
        s = -a / 4.0
        if s < 0.0:
            s = 0.0
        elif s > dt[j]:
            s = dt[j]
        dist = math.sqrt(math.sqrt((a + 4.0 * s) ** 2 + b * b))
        if dist < min_im or dist < resolution * math.sqrt(dt[j]):
            return True, j, s, x, y
        wr, wi = _shifted_root(dx, y, 4.0 * dt[j])
        x = u + wr
        y = wi
        if y <= min_im and j + 1 < U.shape[0] and (x - U[j + 1]) * dx < 0.0:
            # a point pressed onto the real line is swallowed once the
            # driver passes it (the discrete hull never closes exactly)
            return True, j, dt[j], x, y
    return False, stop_index, 0.0, x, y


@numba.njit(cache=True)
def forward_map_kernel(U, dt, xs, ys, stop_index):
    """Apply g_{t_stop} to many points (no swallow bookkeeping)."""
    xs = xs.copy()
    ys = ys.copy()
    for j in range(stop_index):
        u = U[j]
        c = 4.0 * dt[j]
        for k in range(xs.shape[0]):
            wr, wi = _shifted_root(xs[k] - u, ys[k], c)
            xs[k] = u + wr
            ys[k] = wi
    return xs, ys


@numba.njit(cache=True)
def inverse_map_kernel(U, dt, xs, ys, stop_index):
    """Apply g_{t_stop}^{-1} to many points."""
    xs = xs.copy()
    ys = ys.copy()
    for j in range(stop_index - 1, -1, -1):
        u = U[j]
        c = -4.0 * dt[j]
        for k in range(xs.shape[0]):
            wr, wi = _shifted_root(xs[k] - u, ys[k], c)
            xs[k] = u + wr
            ys[k] = wi
    return xs, ys


@numba.njit(cache=True)
def unzip_kernel(xs, ys, max_dcap):
    """Vertical-slit unzipping of the polyline (xs, ys).

    Returns (us, dts, status, index): step driver values and durations,
    status 0 on success, 1 if a mapped vertex left the open half-plane
    (index = offending vertex).  Steps whose capacity would exceed
    ``max_dcap`` are split along the straight segment from the current
    base point in mapped coordinates.
    """
    n = xs.shape[0]
    xs = xs.copy()
    ys = ys.copy()
    us = []
    dts = []
    base = xs[0]
    i = 1
    while i < n:
        px = xs[i]
        py = ys[i]
        if py <= 0.0:
            if py == 0.0 and px == base:
                # repeated vertex
                i += 1
                continue
            return us, dts, 1, i
        dcap = 0.5 * py * py
        if dcap > max_dcap * (1.0 + 1e-9):
            frac = math.sqrt(2.0 * max_dcap) / py
            qx = base + frac * (px - base)
            qy = frac * py
            start = i
        else:
            qx = px
            qy = py
            start = i + 1
        u = qx
        dtk = 0.25 * qy * qy
        c = qy * qy
        for k in range(start, n):
            wr, wi = _shifted_root(xs[k] - u, ys[k], c)
            xs[k] = u + wr
            ys[k] = wi
        us.append(u)
        dts.append(dtk)
        base = u
        if start == i + 1:
            i += 1
    return us, dts, 0, -1


@numba.njit(cache=True)
def _radial_rhs(gr, gi, wr, wi):
    # g (W + g) / (W - g)
    nr = gr * (wr + gr) - gi * (wi + gi)
    ni = gr * (wi + gi) + gi * (wr + gr)
    dr = wr - gr
    di = wi - gi
    den = dr * dr + di * di
    return (nr * dr + ni * di) / den, (ni * dr - nr * di) / den


@numba.njit(cache=True)
def _rk4_step(gr, gi, wr, wi, h):
    k1r, k1i = _radial_rhs(gr, gi, wr, wi)
    k2r, k2i = _radial_rhs(gr + 0.5 * h * k1r, gi + 0.5 * h * k1i, wr, wi)
    k3r, k3i = _radial_rhs(gr + 0.5 * h * k2r, gi + 0.5 * h * k2i, wr, wi)
    k4r, k4i = _radial_rhs(gr + h * k3r, gi + h * k3i, wr, wi)
    gr += h * (k1r + 2.0 * k2r + 2.0 * k3r + k4r) / 6.0
    gi += h * (k1i + 2.0 * k2i + 2.0 * k3i + k4i) / 6.0
    return gr, gi


@numba.njit(cache=True)
def _substeps(gr, gi, wr, wi, h):
    # refine RK4 near the singularity at W: velocity ~ 2/|g - W|
    dist = math.sqrt((gr - wr) ** 2 + (gi - wi) ** 2)
    if dist <= 0.0:
        return 256
    ratio = 3.0 * abs(h) / (dist * dist)
    m = int(math.ceil(ratio))
    if m < 1:
        m = 1
    if m > 256:
        m = 256
    return m


@numba.njit(cache=True)
def radial_trace_kernel(theta, dt):
    """Radial trace points gamma(t_k) = g_{t_k}^{-1}(W_{t_k}), W = exp(i theta).

    The last partial step is replaced by the local slit picture (the tip
    sits at W_k exp(-2 sqrt(dt_k))); the remaining steps run the radial
    equation backwards with RK4, refined near the driver.
    """
    n = dt.shape[0]
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    xs[0] = math.cos(theta[0])
    ys[0] = math.sin(theta[0])
    for k in range(n):
        rad = math.exp(-2.0 * math.sqrt(dt[k]))
        gr = rad * math.cos(theta[k])
        gi = rad * math.sin(theta[k])
        for j in range(k - 1, -1, -1):
            wr = math.cos(theta[j])
            wi = math.sin(theta[j])
            h = -dt[j]
            m = _substeps(gr, gi, wr, wi, h)
            for _ in range(m):
                gr, gi = _rk4_step(gr, gi, wr, wi, h / m)
        xs[k + 1] = gr
        ys[k + 1] = gi
    return xs, ys


@numba.njit(cache=True)
def radial_forward_kernel(theta, dt, gr, gi, stop_index):
    """Forward RK4 of the radial equation for one point."""
    for j in range(stop_index):
        wr = math.cos(theta[j])
        wi = math.sin(theta[j])
        m = _substeps(gr, gi, wr, wi, dt[j])
        for _ in range(m):
            gr, gi = _rk4_step(gr, gi, wr, wi, dt[j] / m)
    return gr, gi


@numba.njit(cache=True)
def evolve_point_bridge_kernel(U, dt, x, y, kappa, eps, max_depth, min_dist, normals):
    """Point evolution with Brownian-bridge refinement of the driver.

    A grid step [t, t + h] with driver values a -> b is split at its midpoint,
    with the midpoint value drawn from the Brownian bridge, whenever
    max(kappa h, (b - a)**2) > eps**2 |g - a|**2.  Refined substeps are then
    treated like ordinary slit steps.  A point that still needs refinement
    at ``max_depth`` is closer to the driver than the path can resolve and
    is counted as swallowed on its current side.

    Returns (status, j, s, x, y, side, used): status 1 swallowed, 0 survived
    to the end of the grid, -1 ran out of pre-drawn normals; ``side`` is the
    sign of g - U at the end (or at the swallow); ``used`` counts normals.
    """
    depth_cap = max_depth + 2
    hs = np.empty(depth_cap)
    As = np.empty(depth_cap)
    Bs = np.empty(depth_cap)
    Ds = np.empty(depth_cap, dtype=np.int64)
    pos = 0
    t_off = 0.0
    side = 0.0
    for j in range(dt.shape[0]):
        top = 0
        hs[0] = dt[j]
        As[0] = U[j]
        Bs[0] = U[j + 1]
        Ds[0] = 0
        top = 1
        t_off = 0.0
        while top > 0:
            top -= 1
            h = hs[top]
            a = As[top]
            b = Bs[top]
            d = Ds[top]
            dx = x - a
            r2 = dx * dx + y * y
            jump = (b - a) * (b - a)
            var = kappa * h
            if max(var, jump) > eps * eps * r2:
                if d >= max_depth:
                    # the point is within the finest driver resolution: swallowed
                    return 1, j, t_off, x, y, math.copysign(1.0, dx), pos
                if pos >= normals.shape[0]:
                    return -1, j, t_off, x, y, side, pos
                m = 0.5 * (a + b) + math.sqrt(0.25 * var) * normals[pos]
                pos += 1
                hs[top] = 0.5 * h
                As[top] = m
                Bs[top] = b
                Ds[top] = d + 1
                hs[top + 1] = 0.5 * h
                As[top + 1] = a
                Bs[top + 1] = m
                Ds[top + 1] = d + 1
                top += 2
                continue
            # closest approach to the driver during this substep
            qa = dx * dx - y * y
            qb = 2.0 * dx * y
            s = -qa / 4.0
            if s < 0.0:
                s = 0.0
            elif s > h:
                s = h
            dist = math.sqrt(math.sqrt((qa + 4.0 * s) ** 2 + qb * qb))
            if dist < min_dist:
                return 1, j, t_off + s, x, y, math.copysign(1.0, dx), pos
            wr, wi = _shifted_root(dx, y, 4.0 * h)
            x = a + wr
            y = wi
            t_off += h
            if y <= min_dist and (x - b) * dx < 0.0:
                return 1, j, t_off, x, y, math.copysign(1.0, dx), pos
            side = x - b
    return 0, dt.shape[0], 0.0, x, y, side, pos
