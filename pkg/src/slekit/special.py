"""Real-argument special functions: Gamma, Gauss 2F1 and the elliptic pair.

The hypergeometric evaluator works on the real branch ``x < 1`` only.  It
uses the power series close to the origin, a Pfaff transformation for
negative arguments and the ``1 - x`` connection formulas (including the
logarithmic cases where ``c - a - b`` is an integer) near ``x = 1``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from scipy.special import digamma

from .errors import DomainError, NumericError

SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 100_000
# below this the direct series is used on [0, 1)
SERIES_CUTOFF = 0.8


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gamma(x: float) -> float:
    """Gamma function; raises DomainError at the poles 0, -1, -2, ..."""
    if _is_nonpositive_int(x):
        raise DomainError(f"gamma has a pole at {x}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma, extended by zero at the poles."""
    if _is_nonpositive_int(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _series(a, b, c, x):
    # stop after 3 consecutive negligible terms
    total = 1.0
    term = 1.0
    small = 0
    for n in range(SERIES_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
        if term == 0.0:
            return total
        if abs(term) < SERIES_RTOL * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise NumericError(f"2F1({a}, {b}; {c}; {x}) series did not converge")


def _polynomial(a, b, c, x):
    # a is a non-positive integer: the series terminates after -a terms
    total = 1.0
    term = 1.0
    for n in range(int(-a)):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
    return total


def _near_one_generic(a, b, c, y):
    """Connection formula in ``y = 1 - x`` for ``c - a - b`` not an integer."""
    s = c - a - b
    first = gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b)
    second = gamma(c) * gamma(-s) * rgamma(a) * rgamma(b)
    out = 0.0
    if first != 0.0:
        out += first * _series(a, b, 1.0 - s, y)
    if second != 0.0:
        out += second * y**s * _series(c - a, c - b, 1.0 + s, y)
    return out


def _near_one_log(a, b, m, y):
    """F(a, b; a + b + m; 1 - y) for integer m >= 0 and small y.

    Abramowitz & Stegun 15.3.10 (m = 0) and 15.3.11 (m >= 1).
    """
    c = a + b + m
    log_y = math.log(y)
    finite = 0.0
    if m > 0:
        pref = gamma(m) * gamma(c) * rgamma(a + m) * rgamma(b + m)
        term = 1.0
        for n in range(m):
            finite += term
            if n < m - 1:
                term *= (a + n) * (b + n) / ((n + 1) * (1 - m + n)) * y
        finite *= pref
    pref = gamma(c) * rgamma(a) * rgamma(b)
    if pref == 0.0:
        return finite
    total = 0.0
    coef = 1.0 / math.factorial(m)
    small = 0
    for n in range(SERIES_MAX_TERMS):
        bracket = float(log_y - digamma(n + 1) - digamma(n + m + 1)
                        + digamma(a + n + m) + digamma(b + n + m))
        term = coef * bracket
        total += term
        if abs(term) < SERIES_RTOL * abs(total) or term == 0.0:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        coef *= (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1)) * y
    else:
        raise NumericError("logarithmic 2F1 series did not converge")
    return finite - (-y) ** m * pref * total


def _unit_interval(a, b, c, x, y):
    """2F1 for 0 <= x < 1; ``y`` is ``1 - x`` computed without cancellation."""
    if x <= SERIES_CUTOFF:
        return _series(a, b, c, x)
    s = c - a - b
    m = round(s)
    gap = abs(s - m)
    if gap < 1e-12:
        if m < 0:
            # Euler transformation makes the excess positive
            return y**m * _near_one_log(c - a, c - b, -m, y)
        return _near_one_log(a, b, m, y)
    if gap < 1e-6 and x <= 0.995:
        # connection formula cancels badly this close to an integer excess
        return _series(a, b, c, x)
    return _near_one_generic(a, b, c, y)


def hyp2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; x) for real x < 1.

    Raises:
        DomainError: if c is a non-positive integer or x >= 1.
    """
    if _is_nonpositive_int(c):
        raise DomainError(f"2F1 undefined for c = {c}")
    if not x < 1.0:
        raise DomainError(f"2F1 real branch needs x < 1, got {x}")
    if x == 0.0:
        return 1.0
    for p, q in ((a, b), (b, a)):
        if _is_nonpositive_int(p):
            return _polynomial(p, q, c, x)
    if x > 0.0:
        return _unit_interval(a, b, c, x, 1.0 - x)
    # Pfaff: F(a,b;c;x) = (1-x)^(-a) F(a, c-b; c; x/(x-1))
    z = x / (x - 1.0)
    w = 1.0 / (1.0 - x)
    if _is_nonpositive_int(c - b):
        return w**a * _polynomial(c - b, a, c, z)
    if _is_nonpositive_int(c - a):
        return w**b * _polynomial(c - a, b, c, z)
    return w**a * _unit_interval(a, c - b, c, z, w)


class EllipticPair(NamedTuple):
    K: float
    K_prime: float
    rho: float


def elliptic_pair(rho: float) -> EllipticPair:
    """Quarter periods of the rectangle that ``int dz / sqrt(z(z-1)(z-rho))``
    maps the upper half-plane onto.

    ``sqrt(rho) K = pi 2F1(1/2, 1/2; 1; 1/rho)`` and
    ``sqrt(rho) K' = pi 2F1(1/2, 1/2; 1; 1 - 1/rho)``.
    """
    if not rho > 1.0:
        raise DomainError(f"elliptic_pair needs rho > 1, got {rho}")
    root = math.sqrt(rho)
    k = math.pi * hyp2f1(0.5, 0.5, 1.0, 1.0 / rho) / root
    kp = math.pi * hyp2f1(0.5, 0.5, 1.0, 1.0 - 1.0 / rho) / root
    return EllipticPair(k, kp, rho)
