import math

import numpy as np
import pytest
import scipy.special

from fundsol.errors import BadTolerance, InvalidConfig, UnsupportedDimension
from fundsol.quadrature import (integrate, integrate_with_estimate, log_weighted_integral,
                                radial_rule, sphere_area, sphere_rule, tail_radius)


@pytest.mark.parametrize('n', range(2, 9))
def test_sphere_weights_sum_to_area(n):
    rule = sphere_rule(n, 2)
    assert np.sum(rule.weights) == pytest.approx(sphere_area(n), rel=1e-13)
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-14)
    assert np.all(rule.weights > 0.0)


@pytest.mark.parametrize('n', range(2, 7))
def test_sphere_moments(n):
    rule = sphere_rule(n, 3)
    area = sphere_area(n)
    x = rule.nodes
    assert rule.integrate(x[:, 0] ** 2) == pytest.approx(area / n, rel=1e-12)
    assert rule.integrate(x[:, -1] ** 4) == pytest.approx(3 * area / (n * (n + 2)), rel=1e-12)
    assert abs(rule.integrate(x[:, 0] * x[:, 1] ** 2)) < 1e-13


def test_sphere_quartic_moment():
    x = sphere_rule(3, 3).nodes
    assert sphere_rule(3, 3).integrate(x[:, 0] ** 2 * x[:, 1] ** 2) == pytest.approx(
        4 * math.pi / 15, rel=1e-13)


@pytest.mark.parametrize('n,exact', [
    (3, 4 * math.pi * math.sinh(1.0)),
    (4, 4 * math.pi ** 2 * scipy.special.iv(1, 1.0)),
])
def test_sphere_refinement_of_exponential(n, exact):
    errors = []
    for level in range(1, 6):
        rule = sphere_rule(n, level)
        errors.append(abs(rule.integrate(np.exp(rule.nodes[:, 0])) - exact))
    for a, b in zip(errors, errors[1:]):
        assert b <= a + 1e-12
    assert errors[-1] < 1e-11


def test_sphere_node_counts():
    assert len(sphere_rule(2, 1)) == 32
    assert len(sphere_rule(3, 1)) == 8 * 16
    assert len(sphere_rule(4, 2)) == 2 * 2 * 4


@pytest.mark.parametrize('n,level,error', [
    (1, 2, UnsupportedDimension),
    (9, 2, UnsupportedDimension),
    (3, 0, InvalidConfig),
])
def test_sphere_rule_rejects(n, level, error):
    with pytest.raises(error):
        sphere_rule(n, level)


@pytest.mark.parametrize('a', [0.0, -0.5, 1.0, 2.5])
def test_radial_gamma_integrals(a):
    rule = radial_rule(1.0, degree=3)
    value = integrate(lambda r: r ** a * np.exp(-0.5 * r * r), rule)
    exact = 2.0 ** ((a - 1) / 2) * scipy.special.gamma((a + 1) / 2)
    assert value == pytest.approx(exact, rel=1e-11)


def test_log_weighted_integrals():
    rule = radial_rule(1.0)
    value = log_weighted_integral(lambda u: np.exp(-0.5 * u * u), rule)
    assert value == pytest.approx(-math.sqrt(math.pi / 2) * (np.euler_gamma + math.log(2)) / 2,
                                  rel=1e-11)

    # e^{-u} decays slower than any unit Gaussian; a small width stretches R
    rule = radial_rule(0.05)
    value = log_weighted_integral(lambda u: np.exp(-u), rule)
    assert value == pytest.approx(-np.euler_gamma, abs=1e-12)


def test_log_weighted_gaussian_moments():
    rule = radial_rule(1.0, degree=3)
    gauss = lambda u: np.exp(-0.5 * u * u)
    assert log_weighted_integral(lambda u: u * gauss(u), rule) == pytest.approx(
        (math.log(2) - np.euler_gamma) / 2, rel=1e-11)
    assert log_weighted_integral(lambda u: (u ** 3 - 3 * u) * gauss(u), rule) == pytest.approx(
        1 + (np.euler_gamma - math.log(2)) / 2, rel=1e-11)


def test_log_variant_agrees_with_plain_rule():
    rule = radial_rule(1.0, degree=4)
    h = lambda u: np.where(u > 1.0, (u - 1.0) ** 4, 0.0) * np.exp(-0.5 * u * u)
    assert integrate(lambda u: np.log(u) * h(u), rule) == pytest.approx(
        log_weighted_integral(h, rule), rel=1e-12)


def test_tail_radius():
    eps = 1e-16
    assert tail_radius(1.0, eps) == pytest.approx(math.sqrt(-2 * math.log(eps)))
    r = tail_radius(0.5, eps, degree=6)
    assert r ** 6 * math.exp(-0.25 * r * r) == pytest.approx(eps, rel=1e-6)


def test_coarse_estimate_is_small():
    rule = radial_rule(1.0)
    assert len(rule.coarse()) < len(rule)
    value, estimate = integrate_with_estimate(lambda r: r * np.exp(-0.5 * r * r), rule)
    assert value == pytest.approx(1.0, rel=1e-13)
    assert estimate < 1e-10
    _, estimate = integrate_with_estimate(lambda u: np.exp(-0.5 * u * u), rule, log_weight=True)
    assert estimate < 1e-10


@pytest.mark.parametrize('kwargs', [
    {'decay_width': 1.0, 'eps_tail': 0.0},
    {'decay_width': 1.0, 'eps_tail': 1.0},
    {'decay_width': 0.0},
])
def test_radial_rule_rejects(kwargs):
    with pytest.raises(BadTolerance):
        radial_rule(**kwargs)
