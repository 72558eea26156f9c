from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import erfc

from frachum.errors import DomainError, EvaluationError
from frachum.mlf import (
    DEFAULT_MLF,
    MLFConfig,
    _asymptotic,
    _integral,
    _series,
    mittag_leffler,
    mittag_leffler_array,
    phi_moment_check,
    wright_density,
)

# adaptive-precision mpmath Taylor sums, 20 digits
ORACLE = [
    (0.7, 0.7, -0.5, 0.38661080082252713365),
    (0.7, 0.7, -3.0, 0.035901729730841233827),
    (0.7, 0.7, -12.0, 0.0018480871323738782683),
    (0.7, 0.7, -50.0, 0.00009663624446241805701),
    (0.5, 0.5, -2.0, 0.053398230926744799218),
    (0.3, 1.0, -4.0, 0.16650174431551664824),
    (0.9, 1.0, -20.0, 0.0057495078161091138828),
    (0.6, 1.3, -7.0, 0.10707253795088925576),
]


@pytest.mark.parametrize("alpha,beta,z,expected", ORACLE)
def test_matches_high_precision_oracle(alpha, beta, z, expected):
    assert mittag_leffler(alpha, beta, z) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("alpha,beta,z,expected", ORACLE)
def test_array_matches_scalar(alpha, beta, z, expected):
    got = mittag_leffler_array(alpha, beta, np.array([z, z]))
    assert got == pytest.approx([expected, expected], rel=1e-12)


def test_exponential_case():
    z = np.linspace(-50.0, 0.0, 100)
    assert np.allclose(mittag_leffler_array(1.0, 1.0, z), np.exp(z), rtol=1e-14, atol=0)


def test_half_order_is_scaled_erfc():
    z = np.linspace(-10.0, 0.0, 100)
    ref = np.exp(z**2) * erfc(-z)
    rel = np.abs(mittag_leffler_array(0.5, 1.0, z) - ref) / ref
    assert rel.max() < 1e-12


def test_zero_argument_is_reciprocal_gamma():
    assert mittag_leffler(0.7, 0.7, 0.0) == pytest.approx(1.0 / math.gamma(0.7), rel=1e-15)
    assert mittag_leffler(0.4, 1.0, 0.0) == 1.0


@pytest.mark.parametrize("alpha,beta", [(0.7, 1.0), (0.7, 0.7), (0.55, 0.55), (0.9, 0.9)])
def test_branches_agree_where_they_overlap(alpha, beta):
    # series in extended precision against the integral and the asymptotic sum
    long_series = MLFConfig(series_max_terms=2000)
    for z in (-6.0, -11.0, -14.0):
        s = _series(alpha, beta, z, long_series)
        assert _integral(alpha, beta, np.array([z]))[0] == pytest.approx(s, rel=1e-12)
    for z in (-40.0, -80.0):
        value, err = _asymptotic(alpha, beta, z, DEFAULT_MLF)
        assert err < 1e-14 * abs(value)
        assert _integral(alpha, beta, np.array([z]))[0] == pytest.approx(value, rel=1e-12)


def test_asymptotic_stays_finite_far_out():
    value, err = _asymptotic(0.9, 0.9, -150.0, DEFAULT_MLF)
    assert math.isfinite(value) and value > 0
    assert mittag_leffler(0.9, 0.9, -150.0) == pytest.approx(value, rel=1e-12)


def test_near_one_uses_extended_precision_series():
    # alpha close to 1 sits outside the integral branch; mpmath, 60 digits.
    # The algebraic tail 1/(|z| Gamma(1 - alpha)) already exceeds exp(z) here.
    assert mittag_leffler(0.999, 1.0, -math.pi**2) == pytest.approx(
        1.8448540066697784e-4, rel=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        mittag_leffler(0.7, 1.0, 0.5)
    with pytest.raises(DomainError):
        mittag_leffler(0.0, 1.0, -1.0)
    with pytest.raises(DomainError):
        mittag_leffler(1.2, 1.0, -1.0)
    with pytest.raises(DomainError):
        mittag_leffler_array(0.7, 1.0, np.array([-1.0, 2.0]))


def test_config_validation():
    with pytest.raises(DomainError):
        MLFConfig(series_tol=0.0)
    with pytest.raises(DomainError):
        MLFConfig(series_max_terms=10)


def test_exhausted_term_budget_raises():
    cfg = MLFConfig(series_max_terms=50, asymptotic_terms=1)
    with pytest.raises(EvaluationError):
        mittag_leffler(0.999, 0.999, -9.5, cfg)


@given(st.floats(0.2, 0.95), st.floats(0.0, 40.0), st.floats(0.01, 5.0))
def test_relaxation_is_decreasing_and_bounded(alpha, x, dx):
    a = mittag_leffler(alpha, 1.0, -x)
    b = mittag_leffler(alpha, 1.0, -(x + dx))
    assert 0.0 < b < a <= 1.0


@given(st.floats(0.3, 0.95), st.floats(0.6, 30.0))
def test_derivative_identity(alpha, x):
    # E_{a,a}(z) = a d/dz E_{a,1}(z)
    h = 1e-4 * max(1.0, x)
    d = (mittag_leffler(alpha, 1.0, -x + h) - mittag_leffler(alpha, 1.0, -x - h)) / (2 * h)
    assert alpha * d == pytest.approx(mittag_leffler(alpha, alpha, -x), rel=1e-6)


@given(st.floats(0.3, 0.9), st.floats(0.05, 20.0))
def test_recurrence_in_beta(alpha, x):
    # E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z)
    z = -x
    lhs = mittag_leffler(alpha, alpha, z)
    rhs = 1.0 / math.gamma(alpha) + z * mittag_leffler(alpha, 2 * alpha, z)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-13)


@pytest.mark.parametrize("t", [0.3, 1.0, 4.0])
def test_half_order_density_is_levy(t):
    # psi_{1/2}(t) = t**(-3/2) exp(-1/(4t)) / (2 sqrt(pi))
    sv = wright_density(0.5, t, terms=80)
    levy = t**-1.5 * math.exp(-0.25 / t) / (2.0 * math.sqrt(math.pi))
    assert sv.value == pytest.approx(levy, rel=1e-10)
    assert sv.tail_bound < 1e-10 * levy


@pytest.mark.parametrize("alpha", [0.5, 0.7])
@pytest.mark.parametrize("nu", [0.0, 1.0])
def test_moment_identity(alpha, nu):
    numeric, analytic = phi_moment_check(alpha, nu)
    assert analytic == pytest.approx(math.gamma(1 + nu) / math.gamma(1 + alpha * nu), rel=1e-15)
    assert numeric == pytest.approx(analytic, rel=1e-6)
