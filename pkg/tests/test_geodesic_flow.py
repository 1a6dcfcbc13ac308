import math

import numpy as np
import pytest

from finsler_cone.core.errors import InvalidInitialDataError
from finsler_cone.schemas.geodesics import Incidence, InitialData, Termination
from finsler_cone.services.geodesic_flow import (
    batch_integrate,
    integrate_both_ways,
    integrate_geodesic,
)


def test_minkowski_geodesics_are_straight_lines(minkowski):
    solution = integrate_geodesic(minkowski, [0.0, 0.0, 0.0], [1.0, 0.6, 0.0], 5.0)
    assert solution.termination == Termination.PARAMETER_END
    np.testing.assert_allclose(solution.end.x, [5.0, 3.0, 0.0], atol=1e-9)
    state = solution.evaluate([2.5])[0]
    np.testing.assert_allclose(state[:3], [2.5, 1.5, 0.0], atol=1e-9)


def test_lagrangian_is_conserved_on_ads(ads_full):
    solution = integrate_geodesic(ads_full, [0.0, 1.0, 0.3], [1.0, 0.4, 0.2], 3.0)
    assert solution.lagrangian_drift <= 1e-8 * max(1.0, abs(solution.lagrangian_initial))


def test_outward_null_geodesic_hits_ads_boundary(ads_inner):
    # L = 1.25 vt^2 - vr^2 / 1.25 vanishes for vr = 1.25
    solution = integrate_geodesic(ads_inner, [0.0, 0.5, 0.3], [1.0, 1.25, 0.0], 50.0)
    assert solution.termination == Termination.BOUNDARY_HIT
    assert solution.boundary_hit.incidence == Incidence.TRANSVERSAL_OUTWARD
    assert solution.boundary_hit.point[1] == pytest.approx(1.0, abs=1e-10)
    # dt/dr = 1 / (1 + r^2) along radial null curves
    assert solution.boundary_hit.point[0] == pytest.approx(math.atan(1.0) - math.atan(0.5), abs=1e-8)


def test_initial_point_outside_region_is_rejected(ads_inner):
    with pytest.raises(InvalidInitialDataError):
        integrate_geodesic(ads_inner, [0.0, 1.5, 0.3], [1.0, 0.0, 0.0], 1.0)


def test_both_ways_solution_runs_through_the_initial_point(minkowski):
    solution = integrate_both_ways(minkowski, [0.0, 1.0, 0.0], [1.0, 0.5, 0.0], 2.0)
    params = solution.params
    assert params[0] == pytest.approx(-2.0)
    assert params[-1] == pytest.approx(2.0)
    assert np.all(np.diff(params) >= 0.0)
    np.testing.assert_allclose(solution.evaluate([-1.0])[0][:3], [-1.0, 0.5, 0.0], atol=1e-9)
    assert solution.past_termination == Termination.PARAMETER_END


def test_batch_integrate_keeps_order_with_threads(minkowski):
    data = [InitialData(point=[0.0, 0.0, 0.0], velocity=[1.0, 0.1 * k, 0.0]) for k in range(5)]
    serial = batch_integrate(minkowski, data, 1.0)
    threaded = batch_integrate(minkowski, data, 1.0, jobs=3)
    for a, b in zip(serial, threaded):
        assert a.end.x == b.end.x
    assert [s.end.x[1] for s in serial] == pytest.approx([0.1 * k for k in range(5)], abs=1e-10)


def test_rescaled_initial_velocity_traces_the_same_image(ads_full):
    p0, v0, lam = [0.0, 1.0, 0.3], np.array([1.0, 0.4, 0.2]), 2.5
    base = integrate_geodesic(ads_full, p0, v0, 2.0)
    fast = integrate_geodesic(ads_full, p0, lam * v0, 2.0 / lam)
    s = np.linspace(0.0, 2.0, 9)
    slow_states, fast_states = base.evaluate(s), fast.evaluate(s / lam)
    np.testing.assert_allclose(fast_states[:, :3], slow_states[:, :3], atol=1e-8)
    np.testing.assert_allclose(fast_states[:, 3:], lam * slow_states[:, 3:], rtol=1e-7, atol=1e-8)


def test_reversed_geodesic_returns_to_the_initial_point(ads_full):
    p0, v0 = np.array([0.0, 1.0, 0.3]), np.array([1.0, 0.4, 0.2])
    forward = integrate_geodesic(ads_full, p0, v0, 3.0)
    backward = integrate_geodesic(ads_full, forward.end.x, -np.asarray(forward.end.v), 3.0)
    scale = max(1.0, float(np.linalg.norm(p0)))
    assert np.linalg.norm(np.asarray(backward.end.x) - p0) <= 1e-7 * scale
    np.testing.assert_allclose(backward.end.v, -v0, atol=1e-7)
