"""Conformal maps of the upper half-plane.

Complex points are plain Python ``complex`` numbers or numpy complex arrays.
A vertical slit step is described by its base point ``u`` on the real line
and its half-plane capacity ``dcap``; the slit has height ``sqrt(2 dcap)``
and its normalized uniformizing map is ``u + sqrt((z - u)**2 + 2 dcap)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, PointAtInfinity
from .special import elliptic_pair


class SlitStep(NamedTuple):
    u: float
    dcap: float

    @property
    def height(self) -> float:
        return math.sqrt(2.0 * self.dcap)

    @classmethod
    def from_dt(cls, u: float, dt: float) -> "SlitStep":
        """Step produced by running the Loewner flow for time ``dt``."""
        return cls(u, 2.0 * dt)


def _as_complex(z):
    if np.ndim(z) == 0:
        return complex(z), True
    return np.asarray(z, dtype=complex), False


def upper_sqrt(square, reference):
    """Square root of ``square`` lying in the closed upper half-plane.

    The real part takes the sign of ``reference``.  When ``reference`` is
    ``d`` and ``square`` is ``d**2 + c`` with ``c`` real, this is the root
    that varies continuously on the half-plane (including the real line
    away from the slit), since ``Re(w) Im(w) = Re(d) Im(d)``.
    """
    s = np.sqrt(np.asarray(square, dtype=complex))
    out = np.copysign(np.abs(s.real), np.real(reference)) + 1j * np.abs(s.imag)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def slit_forward(z, step: SlitStep):
    """Apply the normalized map removing the vertical slit of ``step``.

    A point exactly at the slit tip goes to ``step.u``.
    """
    if step.dcap < 0:
        raise DomainError("capacity increment must be non-negative")
    z, scalar = _as_complex(z)
    if step.dcap == 0:
        return z
    d = z - step.u
    return step.u + upper_sqrt(d * d + 2.0 * step.dcap, d)


def slit_inverse(w, step: SlitStep):
    """Inverse of :func:`slit_forward`; the driver point maps to the tip."""
    if step.dcap < 0:
        raise DomainError("capacity increment must be non-negative")
    w, scalar = _as_complex(w)
    if step.dcap == 0:
        return w
    d = w - step.u
    return step.u + upper_sqrt(d * d - 2.0 * step.dcap, d)


def compose_forward(steps: Sequence[SlitStep]) -> Callable:
    """Map of the hull grown by ``steps`` in order (first step applied first)."""

    def g(z):
        for s in steps:
            z = slit_forward(z, s)
        return z

    return g


def capacity_sum(steps: Iterable[SlitStep]) -> float:
    """Half-plane capacity of the hull built from successive slit steps."""
    return math.fsum(s.dcap for s in steps)


def fit_far_field(g: Callable, heights=(1e2, 1e3)) -> tuple[float, float]:
    """Fit ``g(z) = z + a1/z + a2/z**2 + ...`` far up the imaginary axis.

    On ``z = iy`` the odd coefficients only enter the imaginary part of
    ``g(z) - z`` (as ``-a1/y + a3/y**3``) and the even ones only the real
    part, so two heights give ``a1`` with an error of order ``y**-4``.
    Returns ``(a1, a2)``; ``a1`` is the half-plane capacity of the hull.
    """
    y1, y2 = (float(h) for h in heights)
    r1 = complex(g(1j * y1)) - 1j * y1
    r2 = complex(g(1j * y2)) - 1j * y2
    odd = np.linalg.solve([[-1 / y1, 1 / y1**3], [-1 / y2, 1 / y2**3]], [r1.imag, r2.imag])
    even = np.linalg.solve([[-1 / y1**2, 1 / y1**4], [-1 / y2**2, 1 / y2**4]],
                           [r1.real, r2.real])
    return float(odd[0]), float(even[0])


@dataclass(frozen=True)
class Mobius:
    """Real Moebius map ``z -> (a z + b) / (c z + d)`` with ``ad - bc > 0``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not self.det > 0:
            raise DomainError("Moebius self-map of H needs ad - bc > 0")

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Mobius") -> "Mobius":
        # matrix product: (self @ other)(z) = self(other(z))
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        return mobius_apply(self, z)


IDENTITY = Mobius(1.0, 0.0, 0.0, 1.0)


def mobius_apply(m: Mobius, z):
    """Evaluate ``m`` at ``z``; raises PointAtInfinity when ``cz + d = 0``."""
    z, scalar = _as_complex(z)
    den = m.c * z + m.d
    if np.any(den == 0):
        raise PointAtInfinity("point is sent to infinity")
    return (m.a * z + m.b) / den


def mobius_from_points(x1: float, x2: float, x3: float) -> Mobius:
    """Self-map of H sending real ``x1, x2, x3`` to ``0, 1, infinity``.

    The points must be in cyclic (counter-clockwise) order on the boundary.
    """
    a, b = x2 - x3, -x1 * (x2 - x3)
    c, d = x2 - x1, -x3 * (x2 - x1)
    det = a * d - b * c
    if det == 0:
        raise DomainError("points must be distinct")
    if det < 0:
        raise DomainError("points are not in counter-clockwise order")
    scale = 1.0 / math.sqrt(det)
    return Mobius(a * scale, b * scale, c * scale, d * scale)


DISK_TO_HALF = "disk_to_half"
HALF_TO_DISK = "half_to_disk"


def disk_half_maps(z, direction: str):
    """Cayley maps between the unit disk and the upper half-plane.

    ``disk_to_half``: ``w -> i(1 + w)/(1 - w)``; boundary points other than
    ``1`` are accepted and land on the real line.
    ``half_to_disk``: ``z -> (z - i)/(z + i)`` on the closed half-plane.
    """
    z, scalar = _as_complex(z)
    if direction == DISK_TO_HALF:
        if np.any(np.abs(z) > 1.0) or np.any(z == 1.0):
            raise DomainError("disk_to_half needs |w| <= 1 and w != 1")
        return 1j * (1 + z) / (1 - z)
    if direction == HALF_TO_DISK:
        if np.any(np.imag(z) < 0):
            raise DomainError("half_to_disk needs Im z >= 0")
        return (z - 1j) / (z + 1j)
    raise DomainError(f"unknown direction {direction!r}")


class RectGeometry(NamedTuple):
    L: float
    rho: float
    xi: float


def rect_geometry_from_xi(xi: float) -> RectGeometry:
    """Rectangle ``[0, L] x [0, pi]`` conformally equivalent to H with
    marked points ``0, 1, rho, infinity`` where ``rho = 1/(1 - xi)``.

    ``L`` is the extremal distance (in units where the height is pi)
    between the boundary arcs ``[0, xi]``-side and ``[1, infinity]``-side.
    """
    if not 0.0 < xi < 1.0:
        raise DomainError(f"xi must lie in (0, 1), got {xi}")
    rho = 1.0 / (1.0 - xi)
    ep = elliptic_pair(rho)
    return RectGeometry(math.pi * ep.K_prime / ep.K, rho, xi)


def xi_from_length(L: float) -> float:
    """Inverse of ``rect_geometry_from_xi(xi).L``."""
    if not L > 0:
        raise DomainError("rectangle length must be positive")

    def gap(t):
        # parametrize xi = 1 - exp(-t) to resolve both ends
        return rect_geometry_from_xi(-math.expm1(-t)).L - L

    lo, hi = 1e-12, 1.0
    while gap(hi) < 0:
        hi *= 2.0
    t = brentq(gap, lo, hi, xtol=1e-15, rtol=1e-14)
    return -math.expm1(-t)


def restriction_derivative_halfdisk(x0: float, r: float) -> float:
    """``Psi'(0)`` for the half-disk hull of radius ``r`` centred at ``x0``.

    ``g(z) = (z - x0) + r**2/(z - x0)`` up to translation, so
    ``g'(0) = 1 - r**2/x0**2``.
    """
    if not r > 0 or not abs(x0) > r:
        raise DomainError("need |x0| > r > 0")
    return 1.0 - (r / x0) ** 2


def _excursion_terms(x: float, L: float, tol: float = 1e-12) -> int:
    k = 1
    while (4 / (math.pi * k)) * math.exp(-k * (L - x)) >= tol:
        k += 2
        if k > 10**7:
            break
    return (k + 1) // 2


def excursion_exit_right(z, L: float, n_terms: int | None = None) -> float:
    """Probability that Brownian motion from ``z`` leaves ``[0,L] x [0,pi]``
    through the right edge ``Re z = L``.

    ``n_terms`` counts odd frequencies; by default enough are used that the
    first omitted term is below 1e-12.
    """
    x, y = float(np.real(z)), float(np.imag(z))
    if not (0 < x < L and 0 < y < math.pi):
        raise DomainError("z must lie in the open rectangle")
    if n_terms is None:
        n_terms = _excursion_terms(x, L)
    total = 0.0
    for j in range(n_terms):
        k = 2 * j + 1
        # sinh(kx)/sinh(kL) without overflow
        ratio = math.exp(k * (x - L)) * (-math.expm1(-2 * k * x)) / (-math.expm1(-2 * k * L))
        total += 4.0 / (math.pi * k) * ratio * math.sin(k * y)
    return total
