import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slekit.conformal import (DISK_TO_HALF, HALF_TO_DISK, IDENTITY, Mobius, SlitStep,
                              capacity_sum, compose_forward, disk_half_maps,
                              excursion_exit_right, fit_far_field, mobius_apply,
                              mobius_from_points, rect_geometry_from_xi,
                              restriction_derivative_halfdisk, slit_forward, slit_inverse,
                              xi_from_length)
from slekit.errors import DomainError, PointAtInfinity


# Moebius maps

def test_mobius_examples():
    assert mobius_apply(IDENTITY, 1 + 2j) == 1 + 2j
    assert mobius_apply(Mobius(1, 1, 0, 1), 1j) == 1 + 1j
    m = mobius_from_points(-1.0, 0.0, 1.0)
    assert mobius_apply(m, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert mobius_apply(m, -1.0) == pytest.approx(0.0, abs=1e-15)
    # z -> (z + 1)/(1 - z) up to a common factor
    z = 0.3 + 0.7j
    assert mobius_apply(m, z) == pytest.approx((z + 1) / (1 - z), rel=1e-14)


def test_mobius_errors():
    with pytest.raises(DomainError):
        Mobius(0, 1, 1, 0)
    with pytest.raises(PointAtInfinity):
        mobius_apply(Mobius(1, 0, 1, 1), -1.0)


mob = st.tuples(*[st.floats(-3, 3)] * 4).filter(lambda t: t[0] * t[3] - t[1] * t[2] > 0.1)
upper = st.builds(complex, st.floats(-5, 5), st.floats(0.01, 5))


@settings(max_examples=200, deadline=None)
@given(mob, mob, upper)
def test_mobius_group_law(m1, m2, z):
    a, b = Mobius(*m1), Mobius(*m2)
    try:
        lhs = a(b(z))
        rhs = (a @ b)(z)
    except PointAtInfinity:
        return
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
    assert rhs.imag >= 0


# disk and half-plane

def test_disk_half_examples():
    assert disk_half_maps(0.0, DISK_TO_HALF) == 1j
    assert disk_half_maps(1j, HALF_TO_DISK) == 0
    assert disk_half_maps(-1.0, DISK_TO_HALF) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        disk_half_maps(1.5, DISK_TO_HALF)
    with pytest.raises(DomainError):
        disk_half_maps(-1j, HALF_TO_DISK)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 0.999), st.floats(0, 2 * math.pi))
def test_disk_half_round_trip(r, t):
    w = r * complex(math.cos(t), math.sin(t))
    back = disk_half_maps(disk_half_maps(w, DISK_TO_HALF), HALF_TO_DISK)
    assert abs(back - w) <= 1e-12 / (1 - r)


# slit maps

def test_slit_forward_examples():
    s = SlitStep.from_dt(0.0, 0.25)
    assert slit_forward(1j, s) == 0
    assert slit_forward(2j, s) == pytest.approx(1j * math.sqrt(3), rel=1e-15)
    z = 0.4 + 0.9j
    assert slit_forward(z, SlitStep(1.3, 0.0)) == z


def test_slit_inverse_examples():
    s = SlitStep.from_dt(0.7, 0.25)
    assert slit_inverse(0.7, s) == pytest.approx(0.7 + 1j, abs=1e-15)
    assert slit_inverse(0.3 + 2j, SlitStep(0.7, 0.0)) == 0.3 + 2j
    assert slit_inverse(1j * math.sqrt(3), SlitStep.from_dt(0.0, 0.25)) == pytest.approx(2j)


@settings(max_examples=300, deadline=None)
@given(st.floats(-3, 3), st.floats(0.001, 2), st.floats(-5, 5), st.floats(0.05, 5))
def test_slit_round_trip(u, dcap, x, y):
    s = SlitStep(u, dcap)
    z = complex(x, y)
    back = slit_inverse(slit_forward(z, s), s)
    assert abs(back - z) <= 1e-10 * max(1.0, abs(z))
    w = slit_forward(z, s)
    assert w.imag >= 0
    assert abs(slit_forward(slit_inverse(z, s), s) - z) <= 1e-10 * max(1.0, abs(z))


def test_capacity_sum_examples():
    assert capacity_sum([]) == 0
    steps = [SlitStep(0.0, 0.5), SlitStep(0.2, 0.5)]
    assert capacity_sum(steps) == 1.0
    a1, _ = fit_far_field(compose_forward(steps))
    assert a1 == pytest.approx(1.0, abs=1e-6)


def test_capacity_scaling():
    # single slit of height h has a1 = h^2/2; scaling heights by r scales a1 by r^2
    for h in (0.5, 1.0, 3.0):
        a1, _ = fit_far_field(compose_forward([SlitStep(0.3, h * h / 2)]))
        assert a1 == pytest.approx(h * h / 2, rel=1e-6)
        r = 2.5
        a1r, _ = fit_far_field(compose_forward([SlitStep(0.3 * r, (r * h) ** 2 / 2)]))
        assert a1r / a1 == pytest.approx(r * r, rel=1e-6)
        assert a1 <= h * h


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(1e-4, 0.05)), min_size=1, max_size=100))
def test_capacity_additivity(raw):
    steps = [SlitStep(u, d) for u, d in raw]
    a1, _ = fit_far_field(compose_forward(steps))
    assert a1 == pytest.approx(capacity_sum(steps), rel=1e-5)


# rectangles

def test_rect_geometry_examples():
    g = rect_geometry_from_xi(0.5)
    assert g.rho == 2.0
    assert g.L == pytest.approx(math.pi, rel=1e-13)
    g = rect_geometry_from_xi(1 - 1e-6)
    assert abs(g.L - (-math.log(1e-6))) < 3
    assert rect_geometry_from_xi(0.9).L > rect_geometry_from_xi(0.5).L
    for bad in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(DomainError):
            rect_geometry_from_xi(bad)


@pytest.mark.parametrize("xi", [0.01, 0.3, 0.5, 0.77, 0.999])
def test_xi_from_length_inverse(xi):
    assert xi_from_length(rect_geometry_from_xi(xi).L) == pytest.approx(xi, rel=1e-9)


def test_restriction_derivative():
    assert restriction_derivative_halfdisk(2.0, 1e-8) == pytest.approx(1.0, abs=1e-15)
    assert restriction_derivative_halfdisk(2.0, 1.0) == 0.75
    assert restriction_derivative_halfdisk(-2.0, 1.0) == 0.75
    # derivative of the explicit map (z - x0) + r^2/(z - x0) at 0
    x0, r, h = 2.0, 1.0, 1e-6
    g = lambda z: (z - x0) + r * r / (z - x0)
    assert (g(h) - g(-h)) / (2 * h) == pytest.approx(0.75, rel=1e-8)
    with pytest.raises(DomainError):
        restriction_derivative_halfdisk(1.0, 1.0)


# Brownian excursion exit probability

def test_excursion_square_centre():
    assert excursion_exit_right(complex(math.pi / 2, math.pi / 2), math.pi) == pytest.approx(
        0.25, abs=1e-12)


def test_excursion_order_x():
    L = 4.0
    ratios = [excursion_exit_right(complex(x, math.pi / 2), L) / x for x in (1e-2, 1e-3, 1e-4)]
    assert max(ratios) < 2 * min(ratios)
    assert ratios[-1] == pytest.approx(ratios[-2], rel=1e-3)


def test_excursion_exponential_decay():
    z = complex(1.0, 1.0)
    for L in (10.0, 14.0, 20.0):
        ratio = excursion_exit_right(z, L + 1) / excursion_exit_right(z, L)
        assert ratio == pytest.approx(math.exp(-1), abs=1e-3)


def test_excursion_domain():
    with pytest.raises(DomainError):
        excursion_exit_right(complex(-0.1, 1.0), 2.0)
    with pytest.raises(DomainError):
        excursion_exit_right(complex(1.0, 4.0), 2.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 8), st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.05, 3.09))
def test_excursion_monotone_in_x(L, f1, f2, y):
    x1, x2 = sorted((f1 * L, f2 * L))
    p1 = excursion_exit_right(complex(x1, y), L)
    p2 = excursion_exit_right(complex(x2, y), L)
    assert 0 <= p1 <= 1 and 0 <= p2 <= 1
    assert p2 >= p1 - 1e-12
