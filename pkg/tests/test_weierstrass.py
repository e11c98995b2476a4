"""Immersions from Weierstrass data, checked against closed-form surfaces."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from wlab import catalog, jets
from wlab.errors import DegenerateChartError, NonCanonicalError, OutsideChartError, QuadratureError
from wlab.weierstrass import (
    Chart, adaptive_segment_integral, evaluate, from_gauss_map, from_pair,
    gauss_equation_residual, gauss_normal, integrate_path, stereographic,
)


@pytest.fixture(scope="module")
def enneper():
    return from_gauss_map(lambda w: w, 0.0, Chart(0.8, 0.8))


@pytest.fixture(scope="module")
def exp_chart():
    return from_gauss_map(jets.exp, 0.0, Chart(1.0, 1.5))


def enneper_closed_form(w):
    # Re(w/2 - w^3/6, i(w/2 + w^3/6), w^2/2)
    return np.array([(w / 2 - w**3 / 6).real, (1j * (w / 2 + w**3 / 6)).real, (w**2 / 2).real])


chart_pts = st.builds(complex, st.floats(-0.75, 0.75), st.floats(-0.75, 0.75))


@given(chart_pts)
def test_enneper_matches_closed_form(enneper, w):
    assert np.allclose(evaluate(enneper, w).U, enneper_closed_form(w), atol=1e-13)


def test_catenoid_chart_matches_rotated_explicit_catenoid():
    t0, c = catalog.critical_catenoid_constants()
    s = catalog.catenoid_chart()
    k = np.sqrt(c)
    for w in [0.2 + 0.3j, -0.5 + 1.1j, 0.7 - 2.0j]:
        t, th = w.real / k, w.imag / k
        explicit = c * np.array([np.cosh(t) * np.cos(th), np.cosh(t) * np.sin(th), t])
        assert np.allclose(s.point(w).U, explicit * [-1, -1, 1], atol=1e-12)


@pytest.mark.parametrize("make", [
    lambda: from_gauss_map(lambda w: w, 0.0, Chart(0.8, 0.8)),
    lambda: from_gauss_map(jets.exp, 0.7, Chart(1.0, 1.5)),
    lambda: from_gauss_map(jets.polynomial([0.3, 1.0, 0.2j, -0.1]), 2.0, Chart(0.6, 0.6)),
    lambda: catalog.catenoid_chart().weierstrass,
])
def test_canonical_density_constraint_everywhere(make):
    data = make()
    rng = np.random.default_rng(1)
    c, hu, hv = data.chart.center, data.chart.half_u, data.chart.half_v
    w = c + rng.uniform(-hu, hu, 1000) * 0.999 + 1j * rng.uniform(-hv, hv, 1000) * 0.999
    f = data.f.jet(w, 0).value
    gw = data.g.derivative().jet(w, 0).value
    assert np.max(np.abs(2 * np.abs(f * gw) - 1)) < 1e-12


@given(chart_pts)
def test_canonical_forms(exp_chart, w):
    p = evaluate(exp_chart, w * 1.2)
    assert abs(p.E - p.G) < 1e-10 * p.E and abs(p.F) < 1e-10 * p.E
    assert abs(p.L + 1) < 1e-9 and abs(p.N2 - 1) < 1e-9 and abs(p.M) < 1e-9
    assert abs(p.E - p.lam) < 1e-10 * p.E
    assert abs(p.K + 1 / p.lam**2) < 1e-8 / p.lam**2
    assert abs(p.H) < 1e-10


def test_normal_agrees_with_cross_product(exp_chart):
    p = evaluate(exp_chart, 0.3 - 0.4j)
    c = np.cross(p.U_u, p.U_v)
    assert np.allclose(p.n, exp_chart.normal_sign * c / np.linalg.norm(c), atol=1e-12)


@given(st.builds(complex, st.floats(-5, 5), st.floats(-5, 5)))
def test_stereographic_inverts_gauss_normal(g):
    n = gauss_normal(g)
    assert abs(np.linalg.norm(n) - 1) < 1e-14
    assert abs(stereographic(n) - g) < 1e-11 * max(1, abs(g)) ** 2


def test_path_independence(exp_chart):
    a, b, c = 0.1j, 0.8 + 1.0j, -0.6 + 0.4j
    direct = integrate_path(exp_chart, a, b)
    detour = integrate_path(exp_chart, a, c) + integrate_path(exp_chart, c, b)
    assert np.allclose(direct, detour, atol=1e-13)


def test_third_coordinate_of_enneper_integral(enneper):
    assert abs(integrate_path(enneper, 0, 0.5)[2] - 0.125) < 1e-15


def test_quadrature_failure_is_reported():
    with pytest.raises(QuadratureError):
        adaptive_segment_integral(lambda z: np.array([np.sign(z.real - 1 / 3) * 1.0]), 0, 1, tol=1e-30, max_depth=3)


def test_vanishing_gw_on_grid_rejected():
    with pytest.raises(DegenerateChartError):
        from_gauss_map(lambda w: w * w, 0.0, Chart(0.5, 0.5))


def test_interior_zero_off_grid_found_by_winding():
    # g_w = 2 (w - z0) with z0 off the 17x17 grid
    z0 = 0.0123 + 0.0456j
    with pytest.raises(DegenerateChartError):
        from_gauss_map(lambda w: (w - z0) ** 2, 0.0, Chart(0.5, 0.5))


def test_outside_chart_rejected(enneper):
    with pytest.raises(OutsideChartError):
        evaluate(enneper, 2.0)
    with pytest.raises(OutsideChartError):
        gauss_equation_residual(enneper, 0.79, 0.05)


def test_gauss_residual_requires_canonical_data():
    data = from_pair(lambda w: w, lambda w: 1.0 + 0 * w, Chart(0.5, 0.5))
    with pytest.raises(NonCanonicalError):
        gauss_equation_residual(data, 0.1, 1e-3)


@pytest.mark.parametrize("make, w", [
    (lambda: from_gauss_map(lambda w: w, 0.0, Chart(0.8, 0.8)), 0.3 + 0.2j),
    (lambda: catalog.catenoid_chart().weierstrass, 0.25 - 0.4j),
])
def test_gauss_residual_is_second_order(make, w):
    data = make()
    r1 = gauss_equation_residual(data, w, 2e-3)
    r2 = gauss_equation_residual(data, w, 1e-3)
    assert 3.5 <= r1 / r2 <= 4.5


def test_noncanonical_density_changes_forms():
    data = from_pair(jets.exp, lambda w: 1.0 + 0 * w, Chart(0.5, 0.5))
    p = evaluate(data, 0.2)
    assert abs(p.F) < 1e-12 and abs(p.E - p.G) < 1e-12
    assert abs(p.H) < 1e-10
    assert abs(abs(p.L) - 1) > 1e-3


def test_exponential_chart_density_and_metric(exp_chart):
    assert abs(exp_chart.f(0.0) - 0.5) < 1e-15
    assert abs(exp_chart.f(0.3 + 0.2j) - np.exp(-(0.3 + 0.2j)) / 2) < 1e-15
    assert abs(exp_chart.conformal_factor(0.0) - 1) < 1e-15


def test_linear_gauss_map_series():
    R, a1 = 2.0, 1.3 - 0.4j
    data = from_gauss_map(jets.polynomial([R, a1]), 0.0, Chart(0.5, 0.5))
    assert np.allclose(data.f(np.array([0.1, -0.2j])), 1 / (2 * a1))
    from wlab.weierstrass import immersion_jet
    F1 = immersion_jet(data, 0j, 3)[0]
    assert abs(F1.coeffs[1] - (1 - R * R) / (2 * a1)) < 1e-15


def test_quadratic_gauss_map_series():
    R, a1, a2 = 2.0, 1.3, 0.4 + 0.1j
    data = from_gauss_map(jets.polynomial([R, a1, a2]), 0.0, Chart(0.3, 0.3))
    from wlab.weierstrass import immersion_jet
    F1 = immersion_jet(data, 0j, 3)[0]
    expected = -0.5 * ((1 - a2 / a1**2 * R) * R + a2 / a1**2)
    assert abs(F1.coeffs[2] - expected) < 1e-14


def test_base_point_maps_to_base_position():
    data = from_gauss_map(jets.exp, 0.4, Chart(1, 1), base_point=0.2 - 0.1j, base_position=(1, -2, 3))
    assert np.allclose(evaluate(data, 0.2 - 0.1j).U, [1, -2, 3], atol=0)
    assert np.allclose(integrate_path(data, 0.5, 0.5), 0)


def test_coordinates_are_harmonic(exp_chart):
    w = 0.2 + 0.3j
    lap = []
    for h in (1e-2, 5e-3):
        pts = w + h * np.array([0, 1, -1, 1j, -1j])
        U = np.array([evaluate(exp_chart, p).U for p in pts])
        lap.append(np.max(np.abs(U[1:].sum(0) - 4 * U[0])) / h**2)
    assert lap[1] < lap[0] / 3 and lap[1] < 1e-3


def test_gauss_curvature_from_second_form(exp_chart):
    p = evaluate(exp_chart, -0.4 + 0.9j)
    K_forms = (p.L * p.N2 - p.M**2) / (p.E * p.G - p.F**2)
    assert abs(K_forms - (-1 / p.lam**2)) < 1e-6 * abs(K_forms)
