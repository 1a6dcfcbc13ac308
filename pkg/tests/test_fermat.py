import math

import numpy as np
import pytest

from finsler_cone.core.errors import NotStationaryError
from finsler_cone.models.products import make_stationary
from finsler_cone.schemas.boundary import Verdict
from finsler_cone.schemas.lightspace import PairSpec
from finsler_cone.services.fermat import (
    convexity_probe_S,
    fermat_boundary_convexity,
    fermat_geodesic,
    fermat_metric,
)
from finsler_cone.services.geodesic_flow import lift_product_geodesic
from finsler_cone.services.geometry_core import eval_L


def test_fermat_metric_of_constant_wind():
    model = make_stationary(domain="plane", omega_kind="constant", omega_value=0.5)
    metric = fermat_metric(model)
    assert metric([0.0, 0.0], [1.0, 0.0]) == pytest.approx(0.5 + math.sqrt(1.25), abs=1e-12)
    assert metric([0.0, 0.0], [-1.0, 0.0]) == pytest.approx(math.sqrt(1.25) - 0.5, abs=1e-12)
    assert metric.reversibility_gap([0.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0)


def test_static_fermat_metric_is_reversible(disk):
    assert fermat_metric(disk).reversibility_gap([0.1, 0.2], [0.3, -0.7]) < 1e-14


def test_fermat_metric_needs_a_stationary_model(ads_full):
    with pytest.raises(NotStationaryError):
        fermat_metric(ads_full)


def test_constant_wind_geodesics_are_unit_speed_lines():
    model = make_stationary(domain="plane", omega_kind="constant", omega_value=0.5)
    solution = fermat_geodesic(model, [0.0, 0.0], [1.0, 1.0], 2.0)
    points = solution.points
    np.testing.assert_allclose(points[:, 0], points[:, 1], atol=1e-9)
    metric = fermat_metric(model)
    for sample in solution.samples:
        assert metric(sample.x, sample.v) == pytest.approx(1.0, abs=1e-8)


def test_lift_of_a_fermat_geodesic_is_lightlike():
    model = make_stationary(domain="plane", omega_kind="rotation", omega_value=0.3)
    curve = fermat_geodesic(model, [0.2, -0.1], [1.0, 0.4], 1.5)
    lift = lift_product_geodesic(model, curve)
    for sample in lift.samples[::10]:
        assert abs(eval_L(model, sample.x, sample.v)) <= 1e-8 * max(1.0, float(np.dot(sample.v, sample.v)))
    # the time coordinate advances by the Fermat length
    assert lift.end.x[0] == pytest.approx(curve.end.t, rel=1e-6)


def test_disk_and_cassini_fermat_convexity():
    disk = fermat_boundary_convexity(make_stationary(domain="disk", omega_kind="constant", omega_value=0.3),
                                     grid=8, dirs=2)
    cassini = fermat_boundary_convexity(make_stationary(domain="cassini"), grid=24, dirs=2)
    assert disk.summary.verdict == Verdict.CONVEX
    assert cassini.summary.verdict == Verdict.STRICTLY_CONCAVE


def test_plane_pairs_are_joined_by_minimizers():
    model = make_stationary(domain="plane")
    results = convexity_probe_S(model, [PairSpec(z1=[0.0, 0.0], z2=[1.0, 0.0], label="chord")], fan=16)
    assert len(results) == 1
    assert results[0].status == "found"
    assert results[0].best_length == pytest.approx(1.0, abs=1e-6)
