import math

import pytest

from fundsol.cli import DELTA_SUITE, SUITE_TESTS, parse_test_function
from fundsol.config import RunConfig
from fundsol.errors import NonIntegerDegree, WrongBranch
from fundsol.oracles import (constant_c_numeric, harmonic_constant_c, log_regime_constant,
                             newtonian_gaussian, riesz_gaussian)
from fundsol.pairing import (anisotropy_shift, constant_c, constant_d, pair, pair_subcritical,
                             pair_supercritical, potential_at, radial_rule_for,
                             spherical_average, spherical_average_derivative)
from fundsol.quadrature import sphere_rule
from fundsol.schwartz import gaussian, polynomial_gaussian, value_at_origin
from fundsol.symbols import apply_operator, parse_symbol

LAPLACE_2 = "x1^2+x2^2"
LAPLACE_3 = "x1^2+x2^2+x3^2"


# --- spherical averages ---

def test_spherical_average_radial():
    s = parse_symbol(LAPLACE_2, 2)
    f = gaussian(2, 1.0)
    rule = sphere_rule(2, 3)
    assert spherical_average(s, f, 1.0, rule) == pytest.approx(4 * math.pi ** 2 * math.exp(-0.5))
    assert spherical_average(s, f, 0.0, rule) == 0.0


def test_spherical_average_anisotropic():
    # int_0^{2 pi} dt / (cos^4 t + sin^4 t) = 2 pi sqrt(2)
    s = parse_symbol("x1^4+x2^4", 2)
    value = spherical_average(s, gaussian(2, 1.0), 1.0, sphere_rule(2, 3))
    expected = 2 * math.pi * math.exp(-0.5) * 2 * math.pi * math.sqrt(2)
    assert value == pytest.approx(expected, rel=1e-12)


def test_spherical_average_derivatives():
    s = parse_symbol(LAPLACE_2, 2)
    f = gaussian(2, 1.0)
    rule = sphere_rule(2, 3)
    assert spherical_average_derivative(s, f, 1, 0.0, rule) == pytest.approx(4 * math.pi ** 2)
    assert spherical_average_derivative(s, f, 2, 1.0, rule) == pytest.approx(
        -8 * math.pi ** 2 * math.exp(-0.5))

    s3 = parse_symbol(LAPLACE_3, 3)
    assert spherical_average_derivative(s3, gaussian(3, 1.0), 1, 0.0, sphere_rule(3, 2)) == 0.0


# --- constants ---

def test_constants_values():
    assert constant_c(2, 2) == pytest.approx(-1 / (4 * math.pi ** 2))
    assert constant_d(2, 2) == pytest.approx(-1 / (4 * math.pi ** 2))
    assert constant_c(1, 1) == 0.0
    assert constant_d(1, 1) == pytest.approx(1 / (2 * math.pi))
    assert constant_c(4, 3) == pytest.approx(-(11 / 36) / (8 * math.pi ** 3))
    assert constant_d(4, 3) == pytest.approx(-1 / (6 * (2 * math.pi) ** 3))


@pytest.mark.parametrize('k', range(1, 11))
def test_constants_match_digamma_and_scale_with_dimension(k):
    assert constant_c(k, 3) == pytest.approx(harmonic_constant_c(k, 3), rel=1e-12, abs=1e-15)
    for n in (2, 5):
        assert constant_c(k, n) * (2 * math.pi) ** n == pytest.approx(
            constant_c(k, 1) * 2 * math.pi, rel=1e-14, abs=1e-300)
        assert constant_d(k, n) * (2 * math.pi) ** n == pytest.approx(
            constant_d(k, 1) * 2 * math.pi, rel=1e-14)


@pytest.mark.parametrize('n', [1, 2, 3])
@pytest.mark.parametrize('k', range(1, 11))
def test_constants_match_product_derivative(k, n):
    assert constant_c(k, n) == pytest.approx(constant_c_numeric(k, n), rel=1e-9, abs=1e-300)


def test_constants_reject_fractional_degree():
    with pytest.raises(NonIntegerDegree):
        constant_c(2.5, 2)
    with pytest.raises(NonIntegerDegree):
        constant_d(2.5, 2)


# --- subcritical branch ---

def test_newtonian_potential_pairing(fast_config):
    result = pair(parse_symbol(LAPLACE_3, 3), gaussian(3, 1.0), fast_config)
    assert result.branch == "subcritical"
    assert result.value.real == pytest.approx(1.0, abs=1e-8)
    assert result.local_term is None and result.nonlocal_term is None
    assert result.error_estimate < 1e-8


def test_riesz_half_gaussian(fast_config):
    result = pair(parse_symbol("norm^1", 2), gaussian(2, 1.0), fast_config)
    assert result.value.real == pytest.approx(math.sqrt(math.pi / 2), abs=1e-8)


@pytest.mark.parametrize('n', [2, 3])
def test_riesz_at_integrable_edge(n, fast_config):
    alpha = n - 0.5
    s = parse_symbol("2*norm^%s" % alpha, n)
    result = pair(s, gaussian(n, 1.5), fast_config)
    assert result.value.real == pytest.approx(riesz_gaussian(n, alpha, 2.0, 1.5), rel=1e-8)


def test_subcritical_telescopes_to_delta(fast_config):
    s = parse_symbol(LAPLACE_3, 3)
    f = gaussian(3, 1.0)
    assert pair(s, apply_operator(s, f), fast_config).value.real == pytest.approx(1.0, abs=1e-10)


# --- supercritical branch ---

def test_log_regime_value(fast_config):
    result = pair(parse_symbol(LAPLACE_2, 2), gaussian(2, 1.0), fast_config)
    assert result.branch == "supercritical"
    assert result.local_term.real == pytest.approx(1.0, abs=1e-12)
    assert result.value == result.local_term + result.nonlocal_term
    assert result.value.real == pytest.approx(log_regime_constant(), abs=1e-8)
    assert log_regime_constant() == pytest.approx((math.log(2) - 0.5772156649015329) / 2)


def test_local_term_vanishes_for_flat_transform(fast_config):
    f = polynomial_gaussian({(2, 0): 1.0, (0, 2): 1.0}, 2, 1.0)
    result = pair(parse_symbol(LAPLACE_2, 2), f, fast_config)
    assert abs(result.local_term) < 1e-14
    assert result.value == result.nonlocal_term


def test_branch_dispatch(fast_config):
    assert pair(parse_symbol("(x1^2+x2^2+x3^2)^2", 3), gaussian(3, 1.0),
                fast_config).branch == "supercritical"


def test_wrong_branch_and_fractional_supercritical(fast_config):
    s2 = parse_symbol(LAPLACE_2, 2)
    s3 = parse_symbol(LAPLACE_3, 3)
    f2, f3 = gaussian(2, 1.0), gaussian(3, 1.0)
    with pytest.raises(WrongBranch):
        pair_subcritical(s2, f2, sphere_rule(2, 2), radial_rule_for(s2, f2, fast_config))
    with pytest.raises(WrongBranch):
        pair_supercritical(s3, f3, sphere_rule(3, 2), radial_rule_for(s3, f3, fast_config))
    with pytest.raises(NonIntegerDegree):
        pair(parse_symbol("norm^2.5", 2), f2, fast_config)


@pytest.mark.parametrize('text,n', DELTA_SUITE)
@pytest.mark.parametrize('label', SUITE_TESTS)
def test_delta_property(text, n, label, fast_config):
    s = parse_symbol(text, n)
    f = parse_test_function(label, n)
    expected = value_at_origin(f)
    value = pair(s, apply_operator(s, f), fast_config).value
    assert abs(value - expected) <= 1e-6 * (1 + abs(expected))


def test_linearity(fast_config):
    s = parse_symbol("x1^4+x2^4", 2)
    f = gaussian(2, 1.0)
    g = polynomial_gaussian({(2, 0): 1.0}, 2, 1.0)
    combined = pair(s, 2.0 * f + g * -0.5, fast_config).value
    separate = 2.0 * pair(s, f, fast_config).value - 0.5 * pair(s, g, fast_config).value
    assert combined == pytest.approx(separate, abs=1e-10)


def test_anisotropy_shift(fast_config):
    f = gaussian(2, 1.0)
    rule = sphere_rule(2, 3)
    assert anisotropy_shift(parse_symbol(LAPLACE_2, 2), f, rule) == pytest.approx(0.0, abs=1e-14)
    s = parse_symbol("x1^4+x2^4", 2)
    assert abs(anisotropy_shift(s, f, rule)) > 1e-3
    # P(D) annihilates the shift
    assert abs(anisotropy_shift(s, apply_operator(s, f), rule)) < 1e-14
    result = pair(s, f, fast_config)
    assert result.diagnostics["anisotropy_shift"] == anisotropy_shift(s, f, rule)


# --- potentials ---

@pytest.mark.parametrize('x0', [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 0.6, -0.8), (0.0, 0.0, 3.0)])
def test_newtonian_potential(x0, fine_config):
    s = parse_symbol(LAPLACE_3, 3)
    value = potential_at(s, gaussian(3, 1.0), x0, fine_config)
    assert value.real == pytest.approx(newtonian_gaussian(x0), abs=1e-8)
    assert abs(value.imag) < 1e-10


def test_potential_parity(fast_config):
    s = parse_symbol("x1^4+x2^4", 2)
    f = polynomial_gaussian({(0, 0): 1.0, (2, 0): 0.5}, 2, 1.0)
    x0 = (0.5, 0.3)
    assert potential_at(s, f, x0, fast_config) == pytest.approx(
        potential_at(s, f, (-0.5, -0.3), fast_config), abs=1e-10)


def test_result_dict_keys(fast_config):
    out = pair(parse_symbol(LAPLACE_2, 2), gaussian(2, 1.0), fast_config).to_dict()
    assert set(out) == {"value", "imag", "branch", "local_term", "nonlocal_term",
                        "error_estimate", "diagnostics"}


# --- error estimate ---

def test_error_estimate_sums_sphere_and_radial(fast_config):
    result = pair(parse_symbol(LAPLACE_3, 3), gaussian(3, 1.0), fast_config)
    diagnostics = result.diagnostics
    assert result.error_estimate == diagnostics["sphere_error"] + diagnostics["radial_error"]
    assert diagnostics["radial_error"] < 1e-9


def test_radial_error_vanishes_for_single_panel_rule():
    # with one panel and one graded panel the halved rule is the same rule
    config = RunConfig(sphere_level=3, workers=1, radial_panels=1, radial_grading=1)
    result = pair(parse_symbol(LAPLACE_2, 2), gaussian(2, 1.0), config)
    assert result.diagnostics["radial_error"] == 0.0
    assert result.error_estimate == result.diagnostics["sphere_error"]
