import math

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from slekit.errors import DomainError
from slekit.special import elliptic_pair, gamma, hyp2f1


def test_gamma_examples():
    assert gamma(5) == pytest.approx(24.0, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert gamma(2 / 3) * gamma(1 / 3) == pytest.approx(oracles.FROZEN_GAMMA_REFLECTION, rel=1e-12)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.5, 3.7, 10.25, 33.3, -0.5, -2.5, -7.3])
def test_gamma_against_mpmath(x):
    assert gamma(x) == pytest.approx(oracles.gamma_ref(x), rel=1e-12)


@pytest.mark.parametrize("x", [0, -1, -2, -10])
def test_gamma_poles(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_hyp2f1_examples():
    assert hyp2f1(0.3, -1.7, 2.2, 0.0) == 1.0
    assert hyp2f1(1, 1, 2, 0.5) == pytest.approx(oracles.FROZEN_HYP_LOG, rel=1e-12)
    assert oracles.hyp2f1_series(1, 1, 2, 0.5) == pytest.approx(oracles.FROZEN_HYP_LOG, rel=1e-14)
    assert hyp2f1(0.5, 1, 1.5, -1.0) == pytest.approx(math.pi / 4, rel=1e-12)


def test_hyp2f1_errors():
    with pytest.raises(DomainError):
        hyp2f1(1, 1, 0, 0.5)
    with pytest.raises(DomainError):
        hyp2f1(1, 1, -3, 0.5)
    with pytest.raises(DomainError):
        hyp2f1(1, 1, 2, 1.0)
    with pytest.raises(DomainError):
        hyp2f1(1, 1, 2, 1.5)


CASES = [
    (0.5, 0.5, 1.0, 0.3), (0.5, 0.5, 1.0, 0.999), (0.5, 0.5, 1.0, 1 - 1e-9),
    (1 / 3, 2 / 3, 4 / 3, 0.7), (0.5, 2 / 3, 1.5, -50.0), (0.5, 2.0, 1.5, -1e4),
    (1.2, -0.4, 2.5, 0.95), (2.0, 3.0, 4.5, -0.9), (0.25, 0.75, 1.0, 0.9),
    (-3.0, 1.5, 2.0, 0.4), (1.0, 1.0, 2.0, 0.99999),
]


@pytest.mark.parametrize("a,b,c,x", CASES)
def test_hyp2f1_against_mpmath(a, b, c, x):
    assert hyp2f1(a, b, c, x) == pytest.approx(oracles.hyp2f1_ref(a, b, c, x), rel=1e-10)


@pytest.mark.parametrize("a,b,c,x", [(0.3, 0.6, 1.7, 0.5), (1.5, 0.5, 2.5, 0.75),
                                      (0.5, 1.0, 1.5, -0.6)])
def test_hyp2f1_against_brute_series(a, b, c, x):
    assert hyp2f1(a, b, c, x) == pytest.approx(oracles.hyp2f1_series(a, b, c, x), rel=1e-10)


params = st.floats(-2.5, 2.5).filter(lambda v: abs(v - round(v)) > 0.05)
c_params = st.floats(0.3, 3.5).filter(lambda v: abs(v - round(v)) > 0.05)
args = st.floats(-5.0, 0.95)


@settings(max_examples=150, deadline=None)
@given(params, params, c_params, args)
def test_hyp2f1_symmetric(a, b, c, x):
    assert hyp2f1(a, b, c, x) == pytest.approx(hyp2f1(b, a, c, x), rel=1e-9, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(params, params, c_params, args)
def test_hyp2f1_contiguous_relation(a, b, c, x):
    F = hyp2f1
    lhs = c * (1 - x) * F(a, b, c, x) - c * F(a - 1, b, c, x) + (c - b) * x * F(a, b, c + 1, x)
    scale = max(1.0, abs(c * F(a - 1, b, c, x)), abs(c * (1 - x) * F(a, b, c, x)))
    assert abs(lhs) <= 1e-8 * scale


def test_elliptic_examples():
    ep = elliptic_pair(2.0)
    assert ep.K == pytest.approx(ep.K_prime, rel=1e-13)
    for rho in (1e4, 1e8, 1e12):
        assert math.sqrt(rho) * elliptic_pair(rho).K == pytest.approx(math.pi, abs=5.0 / rho)
    rho = 1e6
    assert abs(math.sqrt(rho) * elliptic_pair(rho).K_prime - math.log(rho)) < 3


@pytest.mark.parametrize("rho", [1.01, 1.5, 2.0, 7.0, 1e3, 1e6])
def test_elliptic_against_agm(rho):
    K, Kp = oracles.elliptic_ref(rho)
    ep = elliptic_pair(rho)
    assert ep.K == pytest.approx(K, rel=1e-9)
    assert ep.K_prime == pytest.approx(Kp, rel=1e-9)


def test_elliptic_ratio_monotone():
    import numpy as np

    rhos = np.geomspace(1.01, 1e6, 200)
    ratio = [elliptic_pair(r).K_prime / elliptic_pair(r).K for r in rhos]
    assert all(b > a for a, b in zip(ratio, ratio[1:]))


@pytest.mark.parametrize("rho", [1.0, 0.5, -2.0])
def test_elliptic_domain(rho):
    with pytest.raises(DomainError):
        elliptic_pair(rho)
