"""The frozen oracle values still follow from the oracles, and the paired
oracles agree with each other."""

import math

import pytest

import oracles


def test_cardy_routes_agree():
    q = oracles.cardy_quadrature(0.3)
    assert q == pytest.approx(oracles.FROZEN_CARDY_6_03, abs=1e-13)
    assert oracles.cardy_shooting(0.3) == pytest.approx(q, abs=1e-6)
    assert oracles.cardy_quadrature(0.5) == pytest.approx(0.5, abs=1e-15)


def test_left_passage_routes_agree():
    for (x, y, k), frozen in [((-1, 1, 6), oracles.FROZEN_LEFT_PASSAGE_6_M1_1),
                              ((1, 1, 2), oracles.FROZEN_LEFT_PASSAGE_2_1_1)]:
        a = oracles.left_passage_mp(x, y, k)
        assert a == pytest.approx(frozen, abs=1e-15)
        assert oracles.left_passage_integral(x, y, k) == pytest.approx(a, abs=1e-12)
    # kappa = 4 reduces to 1/2 + arctan(s)/pi
    assert oracles.left_passage_mp(1, 1, 4) == pytest.approx(0.75, abs=1e-15)


def test_restriction_frozen():
    assert 0.75 ** 0.625 == pytest.approx(oracles.FROZEN_RESTRICTION_2_1, abs=1e-15)


def test_bessel_frozen():
    p = oracles.bessel_swallow_prob(0.5, 6.0, 10.0)
    assert p == pytest.approx(oracles.FROZEN_BESSEL_SWALLOW_05_6_10, abs=1e-15)
    # the hitting-time law is a probability that grows with T
    assert 0 < oracles.bessel_swallow_prob(0.5, 6.0, 1.0) < p < 1


def test_lerw_oracle_triangle():
    law = oracles.lerw_law({0: [1, 2], 1: [0, 2], 2: [0, 1]}, 0, {2})
    assert law[(0, 2)] == pytest.approx(oracles.FROZEN_LERW_TRIANGLE_DIRECT, abs=1e-14)
    assert sum(law.values()) == pytest.approx(1.0, abs=1e-14)


def test_tree_count_oracle():
    c4 = [(0, 1), (1, 2), (2, 3), (0, 3)]
    g23 = [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]
    assert len(oracles.brute_spanning_trees(4, c4)) == oracles.FROZEN_TREE_COUNTS["C4"]
    assert len(oracles.brute_spanning_trees(6, g23)) == oracles.FROZEN_TREE_COUNTS["grid2x3"]


def test_backward_ode_zero_driver():
    z = oracles.backward_trace_tip(lambda t: 0.0, 1.0)
    assert z == pytest.approx(2j, abs=1e-8)


def test_special_frozen():
    assert oracles.hyp2f1_series(1, 1, 2, 0.5) == pytest.approx(oracles.FROZEN_HYP_LOG, rel=1e-15)
    assert oracles.gamma_ref(2 / 3) * oracles.gamma_ref(1 / 3) == pytest.approx(
        oracles.FROZEN_GAMMA_REFLECTION, rel=1e-14)
    assert [float(v) for v in oracles.FROZEN_ARM_HALF[:3]] == [1 / 3, 1.0, 2.0]
    assert math.isclose(oracles.elliptic_ref(2.0)[0], oracles.elliptic_ref(2.0)[1], rel_tol=1e-14)
