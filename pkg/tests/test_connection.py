import numpy as np
import pytest

from finsler_cone.schemas.geodesics import IntegrationOptions
from finsler_cone.services.connection import christoffel, christoffel_array, hessian, spray, spray_euler_lagrange
from finsler_cone.services.geodesic_flow import integrate_both_ways
from finsler_cone.utils.finite_differences import fd_christoffel, relative_gap


def test_minkowski_connection_vanishes(minkowski):
    value = christoffel(minkowski, [0.3, -1.0, 2.0], [1.0, 0.4, 0.2])
    assert np.max(np.abs(np.asarray(value.gamma))) < 1e-14
    assert spray(minkowski, [0.3, -1.0, 2.0], [1.0, 0.4, 0.2]).coeffs == pytest.approx([0.0, 0.0, 0.0], abs=1e-14)


def test_ads_christoffel_matches_closed_form(ads_full):
    # Gamma^r_tt = r (1 + r^2) for L = (1 + r^2) dt^2 - dr^2 / (1 + r^2) - r^2 dtheta^2
    r = 2.0
    gamma = christoffel_array(ads_full, [0.0, r, 0.3], [1.0, 0.5, 0.1])
    assert gamma[1, 0, 0] == pytest.approx(r * (1.0 + r * r), rel=1e-10)
    assert gamma[0, 0, 1] == pytest.approx(r / (1.0 + r * r), rel=1e-10)
    assert gamma[2, 1, 2] == pytest.approx(1.0 / r, rel=1e-10)
    np.testing.assert_allclose(gamma, np.transpose(gamma, (0, 2, 1)), atol=0.0)


def test_christoffel_matches_finite_differences(randers_triple, ads_full):
    for model, p, v in [(randers_triple, [0.0, 0.2, -0.1], [1.0, 0.3, 0.4]),
                        (ads_full, [0.0, 1.5, 0.3], [1.0, 0.2, 0.3])]:
        auto = christoffel_array(model, p, v)
        oracle = fd_christoffel(model.lagrangian, p, v)
        assert relative_gap(auto, oracle) < 1e-5


def test_spray_matches_euler_lagrange_form(ads_full, randers_triple):
    for model, p, v in [(ads_full, [0.0, 1.5, 0.3], [1.0, 0.2, 0.3]),
                        (randers_triple, [0.0, 0.2, -0.1], [1.0, 0.3, 0.4])]:
        np.testing.assert_allclose(spray(model, p, v).as_array(), spray_euler_lagrange(model, p, v),
                                   rtol=1e-8, atol=1e-10)


def test_berwald_hessian_is_symmetric(ads_inner):
    p = [0.0, 1.0, 0.3]
    z, w = np.array([1.0, 0.0, 0.4]), np.array([0.5, 0.0, -1.2])
    first = hessian(ads_inner, ads_inner.boundary, p, [1.0, 0.0, 1.0], z, w)
    second = hessian(ads_inner, ads_inner.boundary, p, [1.0, 0.0, 1.0], w, z)
    assert first == second


def test_hessian_along_a_geodesic_is_the_second_derivative(ads_full):
    def phi(x):
        return x[1] ** 2 * x[2] + x[0] * x[1]

    p0, v0 = np.array([0.0, 1.5, 0.3]), np.array([1.0, 0.2, 0.3])
    solution = integrate_both_ways(ads_full, p0, v0, 0.1, IntegrationOptions(rtol=1e-12, atol=1e-13))

    def second_difference(h):
        values = [phi(state[:3]) for state in solution.evaluate([-h, 0.0, h])]
        return (values[0] - 2.0 * values[1] + values[2]) / (h * h)

    # Richardson step removes the O(h^2) term of the central difference
    h = 0.02
    numeric = (4.0 * second_difference(h / 2) - second_difference(h)) / 3.0
    assert hessian(ads_full, phi, p0, v0, v0, v0) == pytest.approx(numeric, rel=1e-5)
