"""Closed-form SLE and percolation quantities.

Crossing probabilities, crossing/intersection/arm exponents, Hausdorff
dimensions, the restriction probability and the Potts / O(n) parameter maps.
Floating-point evaluators return ``float``; arm exponents are exact
``Fraction`` values.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import DomainError
from .special import gamma, hyp2f1

HALF_PLANE = "half-plane"
PLANE = "plane"

# one-arm (monochromatic) plane exponent; not given by a closed recursion
PLANE_ONE_ARM = Fraction(5, 48)


def cardy_crossing(xi: float, kappa: float = 6.0) -> float:
    """Probability that SLE_kappa (kappa > 4) hits ``[1, infinity)`` before
    ``(-infinity, 0]`` after normalizing the marked points to ``0, xi, 1``.

    For kappa = 6 this is Cardy's formula for a left-right crossing of the
    conformal rectangle with cross-ratio parameter ``xi``.
    """
    if kappa <= 4:
        raise DomainError("crossing formula needs kappa > 4")
    if not 0.0 < xi < 1.0:
        raise DomainError("xi must lie in (0, 1)")
    a = 4.0 / kappa
    pref = 2.0 ** (1.0 - 2.0 * a) * gamma(1.5 - a) / (math.sqrt(math.pi) * gamma(2.0 - a))
    return pref * (1.0 - xi) ** (1.0 - a) * hyp2f1(1.0 - a, a, 2.0 - a, 1.0 - xi)


def _discriminant(kappa: float, lam: float) -> float:
    return math.sqrt((kappa - 4.0) ** 2 + 16.0 * kappa * lam)


def one_sided_exponent(kappa: float, lam: float) -> float:
    """One-sided crossing exponent u(kappa, lambda)."""
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    if lam < 0:
        raise DomainError("lambda must be non-negative")
    return lam + (kappa - 4.0 + _discriminant(kappa, lam)) / (2.0 * kappa)


def annulus_exponent(kappa: float, lam: float) -> float:
    """Annulus crossing exponent nu(kappa, lambda).

    At lambda = 0 this is the limit ``max(kappa - 4, 0)/8``; the square root
    is evaluated as ``|kappa - 4|`` there so no cancellation occurs.
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    if lam < 0:
        raise DomainError("lambda must be non-negative")
    disc = abs(kappa - 4.0) if lam == 0 else _discriminant(kappa, lam)
    return (8.0 * lam + kappa - 4.0 + disc) / 16.0


def left_passage(x0: float, y0: float, kappa: float) -> float:
    """Probability that chordal SLE_kappa passes to the left of ``x0 + i y0``."""
    if not 0.0 < kappa < 8.0:
        raise DomainError("left passage formula needs 0 < kappa < 8")
    if not y0 > 0:
        raise DomainError("the point must lie in the open upper half-plane")
    if x0 == 0:
        return 0.5
    s = x0 / y0
    if kappa == 4.0:
        return 0.5 + math.atan(s) / math.pi
    a = 4.0 / kappa
    pref = gamma(a) / (math.sqrt(math.pi) * gamma((8.0 - kappa) / (2.0 * kappa)))
    p = 0.5 + pref * hyp2f1(0.5, a, 1.5, -s * s) * s
    return min(1.0, max(0.0, p))  # rounding can overshoot by an ulp near saturation


def schramm_theta(theta: float) -> float:
    """Probability that the percolation exploration path passes to the left
    of the point ``e^{i theta}`` relative to the centre of the disk.

    Equivalent to ``left_passage(-cot(theta/2), 1, 6)``.
    """
    if not 0.0 < theta < 2.0 * math.pi:
        raise DomainError("theta must lie in (0, 2 pi)")
    c = math.cos(theta / 2.0) / math.sin(theta / 2.0)
    pref = gamma(2.0 / 3.0) / (math.sqrt(math.pi) * gamma(1.0 / 6.0))
    return 0.5 - pref * hyp2f1(0.5, 2.0 / 3.0, 1.5, -c * c) * c


def _check_lambdas(lambdas: Sequence[float]) -> list[float]:
    lams = [float(v) for v in lambdas]
    if not lams:
        raise DomainError("need at least one argument")
    if any(v < 0 for v in lams):
        raise DomainError("exponent arguments must be non-negative")
    return lams


def bm_halfplane_exponent(*lambdas: float) -> float:
    """Half-plane intersection exponent xi~(lambda_1, ..., lambda_k)."""
    if len(lambdas) == 1 and hasattr(lambdas[0], "__iter__"):
        lambdas = tuple(lambdas[0])
    lams = _check_lambdas(lambdas)
    k = len(lams)
    if k == 1:
        return lams[0]
    s = math.fsum(math.sqrt(1.0 + 24.0 * v) for v in lams) - (k - 1)
    return (s * s - 1.0) / 24.0


def bm_plane_exponent(*lambdas: float) -> float:
    """Whole-plane intersection exponent xi(lambda_1, ..., lambda_k).

    Requires at least two arguments, each at least 1 (packets of one or more
    full paths).
    """
    if len(lambdas) == 1 and hasattr(lambdas[0], "__iter__"):
        lambdas = tuple(lambdas[0])
    lams = _check_lambdas(lambdas)
    if len(lams) < 2 or any(v < 1 for v in lams):
        raise DomainError("plane exponent needs at least two arguments >= 1")
    s = math.fsum(math.sqrt(1.0 + 24.0 * v) for v in lams) - len(lams)
    return (s * s - 4.0) / 48.0


def bm_mixed_exponent(k: int, lam: float) -> float:
    """xi(k, lambda): k paths in the plane against a packet of weight lambda.

    Integer k >= 1 and lambda >= 0; this covers xi(1, 0) and xi(2, 0).
    """
    if int(k) != k or k < 1:
        raise DomainError("k must be a positive integer")
    if lam < 0:
        raise DomainError("lambda must be non-negative")
    s = math.sqrt(1.0 + 24.0 * k) + math.sqrt(1.0 + 24.0 * lam) - 2.0
    return (s * s - 4.0) / 48.0


def arm_exponent(k: int, geometry: str = HALF_PLANE) -> Fraction:
    """Polychromatic arm exponents of critical percolation.

    Half-plane: k(k+1)/6.  Plane: (k**2 - 1)/12 for k >= 2; for k = 1 the
    stored one-arm value 5/48 is returned.
    """
    if int(k) != k or k < 0:
        raise DomainError("number of arms must be a non-negative integer")
    k = int(k)
    if geometry == HALF_PLANE:
        return Fraction(k * (k + 1), 6)
    if geometry == PLANE:
        if k == 0:
            raise DomainError("plane arm exponent needs k >= 1")
        if k == 1:
            return PLANE_ONE_ARM
        return Fraction(k * k - 1, 12)
    raise DomainError(f"unknown geometry {geometry!r}")


class HausdorffDims(NamedTuple):
    trace_dim: float
    boundary_dim: float | None
    boundary_status: str | None


def hausdorff_dims(kappa: float) -> HausdorffDims:
    """Dimension of the trace and, for kappa > 4, of the hull boundary.

    The boundary value is marked "proven" at kappa = 6 and 8 and
    "conjectured" otherwise.
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    trace = min(2.0, 1.0 + kappa / 8.0)
    if kappa <= 4:
        return HausdorffDims(trace, None, None)
    status = "proven" if kappa in (6.0, 8.0) else "conjectured"
    return HausdorffDims(trace, 1.0 + 2.0 / kappa, status)


def restriction_prob(psi_prime_0: float) -> float:
    """Probability that SLE_{8/3} avoids a hull whose normalized map has
    derivative ``psi_prime_0`` at the origin."""
    if not 0.0 < psi_prime_0 <= 1.0:
        raise DomainError("Psi'(0) must lie in (0, 1]")
    return psi_prime_0 ** 0.625


def potts_q(kappa: float) -> float:
    """Potts model parameter q = 2 + 2 cos(8 pi / kappa), kappa in [4, 8]."""
    if not 4.0 <= kappa <= 8.0:
        raise DomainError("Potts map needs kappa in [4, 8]")
    return 2.0 + 2.0 * math.cos(8.0 * math.pi / kappa)


def loop_n(kappa: float) -> float:
    """O(n) loop weight n = -2 cos(4 pi / kappa), kappa in [8/3, 8]."""
    if not 8.0 / 3.0 - 1e-15 <= kappa <= 8.0:
        raise DomainError("O(n) map needs kappa in [8/3, 8]")
    return -2.0 * math.cos(4.0 * math.pi / kappa)


def model_parameter_maps(kappa: float) -> tuple[float | None, float | None]:
    """(q, n) for kappa; an entry is None outside its range."""
    q = potts_q(kappa) if 4.0 <= kappa <= 8.0 else None
    n = loop_n(kappa) if 8.0 / 3.0 - 1e-15 <= kappa <= 8.0 else None
    return q, n


def critical_points(q: float | None = None, n: float | None = None):
    """(beta_c, x_c): Potts exp(beta_c) = 1 + sqrt(q); O(n) x_c = (2 + sqrt(2 - n))^{-1/2}."""
    beta_c = x_c = None
    if q is not None:
        if q < 0:
            raise DomainError("q must be non-negative")
        beta_c = math.log1p(math.sqrt(q))
    if n is not None:
        if not 0.0 <= n <= 2.0:
            raise DomainError("n must lie in [0, 2]")
        x_c = (2.0 + math.sqrt(2.0 - n)) ** -0.5
    return beta_c, x_c
