"""Truncated power series: ring axioms, recursions and elementary functions."""
import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wlab import jets
from wlab.errors import JetMismatchError
from wlab.jets import ComplexJet, Holomorphic

ORDER = 6

small = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, small, small)
coeff_lists = st.lists(cplx, min_size=ORDER + 1, max_size=ORDER + 1)


def J(cs, base=0j):
    return ComplexJet(base, cs)


def close(a, b, tol=1e-10):
    scale = max(1.0, np.max(np.abs(a.coeffs)), np.max(np.abs(b.coeffs)))
    return np.max(np.abs(a.coeffs - b.coeffs)) <= tol * scale


# ---------------------------------------------------------------------------
# ring axioms
# ---------------------------------------------------------------------------
@given(coeff_lists, coeff_lists, coeff_lists)
def test_multiplication_is_associative_and_distributive(a, b, c):
    a, b, c = J(a), J(b), J(c)
    assert close((a * b) * c, a * (b * c), 1e-9)
    assert close(a * (b + c), a * b + a * c, 1e-9)


@given(coeff_lists, coeff_lists)
def test_multiplication_commutes(a, b):
    assert close(J(a) * J(b), J(b) * J(a), 1e-12)


@given(coeff_lists)
def test_reciprocal_is_inverse(a):
    a[0] = a[0] + (2.0 if abs(a[0]) < 0.5 else 0)
    x = J(a)
    one = x * jets.jet_recip(x)
    assert abs(one.coeffs[0] - 1) < 1e-10
    assert np.max(np.abs(one.coeffs[1:])) < 1e-7 * max(1, np.max(np.abs(x.coeffs))) ** ORDER


def test_reciprocal_of_zero_constant_term_raises():
    with pytest.raises(ZeroDivisionError):
        jets.jet_recip(J([0, 1, 2]))


def test_mismatched_bases_raise():
    with pytest.raises(JetMismatchError):
        J([1, 2], 0j) + J([1, 2], 1j)


def test_derivative_of_order_zero_raises():
    with pytest.raises(JetMismatchError):
        jets.jet_derivative(J([3.0]))


def test_nonfinite_coefficients_rejected():
    with pytest.raises(ValueError):
        J([1, np.nan])


@given(coeff_lists)
def test_antiderivative_inverts_derivative(a):
    x = J(a)
    back = x.derivative().antiderivative(x.coeffs[0])
    assert close(back, x, 1e-12)


@given(coeff_lists, coeff_lists)
def test_truncation_commutes_with_product(a, b):
    full = (J(a) * J(b)).truncate(3)
    assert close(full, J(a).truncate(3) * J(b).truncate(3), 1e-12)


# ---------------------------------------------------------------------------
# oracles: Taylor coefficients known in closed form
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("w0", [0j, 0.3 - 0.7j, -1.2 + 0.4j])
def test_exp_coefficients(w0):
    e = jets.exp(ComplexJet.variable(w0, 8))
    expected = [cmath.exp(w0) / math.factorial(k) for k in range(9)]
    assert np.allclose(e.coeffs, expected, rtol=1e-14, atol=0)


def test_log_series_of_one_plus_w():
    lg = jets.log(1 + ComplexJet.variable(0j, 7))
    expected = [0] + [(-1) ** (k + 1) / k for k in range(1, 8)]
    assert np.allclose(lg.coeffs, expected, atol=1e-15)


def test_sqrt_squares_back():
    x = 2 + ComplexJet.variable(0.1j, 6)
    s = jets.sqrt(x)
    assert close(s * s, x, 1e-13)


def test_trig_and_hyperbolic_identities():
    x = ComplexJet.variable(0.2 + 0.1j, 7)
    one = jets.sin(x) * jets.sin(x) + jets.cos(x) * jets.cos(x)
    assert close(one, ComplexJet.constant(1, x.base, 7), 1e-13)
    one_h = jets.cosh(x) * jets.cosh(x) - jets.sinh(x) * jets.sinh(x)
    assert close(one_h, ComplexJet.constant(1, x.base, 7), 1e-13)


def test_geometric_series():
    r = 1 / (1 - ComplexJet.variable(0j, 6))
    assert np.allclose(r.coeffs, 1.0)


def test_integer_power_matches_repeated_product():
    x = J([1 + 1j, 0.5, -0.25, 0.1])
    assert close(x**3, x * x * x, 1e-14)
    assert close(x**-2, jets.jet_recip(x * x), 1e-13)


def test_derivative_value_scales_by_factorial():
    e = jets.exp(ComplexJet.variable(0j, 6))
    assert all(abs(e.derivative_value(k) - 1) < 1e-13 for k in range(7))


@given(coeff_lists, cplx)
def test_horner_evaluation_matches_direct_sum(a, z):
    z = z / 4
    direct = sum(c * z**k for k, c in enumerate(a))
    assert abs(J(a)(z) - direct) <= 1e-12 * max(1, abs(direct))


def test_batched_jets_match_one_at_a_time():
    pts = np.array([0.1, 0.2j, -0.3 + 0.1j])
    batch = jets.exp(ComplexJet.variable(pts, 5)) * jets.sin(ComplexJet.variable(pts, 5))
    for k, p in enumerate(pts):
        single = jets.exp(ComplexJet.variable(p, 5)) * jets.sin(ComplexJet.variable(p, 5))
        assert np.allclose(batch.coeffs[:, k], single.coeffs, rtol=1e-15)


def test_polynomial_helper_and_holomorphic_derivative():
    p = Holomorphic.wrap(jets.polynomial([1, 2, 3], center=1.0))
    assert abs(p(2.0) - 6) < 1e-14
    assert abs(p.derivative()(2.0) - 8) < 1e-13


def test_holomorphic_jet_of_expression():
    h = Holomorphic.from_expression(lambda w: jets.exp(2 * w))
    jt = h.jet(0.5, 4)
    expected = [math.exp(1) * 2**k / math.factorial(k) for k in range(5)]
    assert np.allclose(jt.coeffs, expected, rtol=1e-14)


# ---------------------------------------------------------------------------
# small worked cases
# ---------------------------------------------------------------------------
def test_binomial_square_and_quadratic_coefficient():
    R, a1, a2 = 2.0, 0.5 - 1j, 0.3j
    g = J([R, a1, a2])
    sq = g * g
    assert np.allclose(sq.coeffs, [R * R, 2 * R * a1, 2 * R * a2 + a1 * a1])


def test_reciprocal_of_gauss_map_derivative():
    a1, a2, a3 = 1.5 + 0.5j, -0.2, 0.7j
    r = jets.jet_recip(J([a1, 2 * a2, 3 * a3]))
    assert abs(r.coeffs[1] + 2 * a2 / a1**2) < 1e-15
    assert abs(r.coeffs[2] - (4 * a2**2 / a1**3 - 3 * a3 / a1**2)) < 1e-15
    assert np.allclose(jets.jet_recip(J([2.0, 0, 0])).coeffs, [0.5, 0, 0])


def test_power_rule_and_constant_derivative():
    w3 = ComplexJet.variable(0j, 4) ** 3
    assert np.allclose(w3.derivative().coeffs, [0, 0, 3, 0])
    assert np.allclose(ComplexJet.constant(5, 0j, 3).derivative().coeffs, 0)


def test_truncated_exponential_series_value():
    e = jets.exp(ComplexJet.variable(0j, 12))
    assert abs(e(0.1) - math.exp(0.1)) < 1e-12
