import numpy as np
import pytest

from finsler_cone.core.errors import DomainError, GridMismatchError, NotLightlikeError
from finsler_cone.models.catalog import build_model
from finsler_cone.models.products import make_minkowski
from finsler_cone.schemas.lightspace import CauchySurface, ChartKind, LightspacePoint
from finsler_cone.services.lightspace import (
    cone_surface_construction,
    detect_nonhausdorff,
    glue_charts,
    identify,
    image_separation,
    sample_chart_boundary,
    sample_chart_interior,
    trace_lightspace_point,
    transition_map,
    validate_certificate,
)

SURFACE = CauchySurface(level=0.0)


def test_cylinder_strip_interior_charts_glue_pairwise(cylinder_strip):
    plus = sample_chart_interior(cylinder_strip, SURFACE, grid=5, dirs=2, sign=1)
    minus = sample_chart_interior(cylinder_strip, SURFACE, grid=5, dirs=2, sign=-1)
    assert len(plus) == len(minus) == 10
    glued = glue_charts(plus, minus)
    assert len(glued.classes) == 10
    assert all(len(c.members) == 2 for c in glued.classes)
    for q in plus + minus:
        assert len(q.coordinates) == 1
        assert cylinder_strip.omega(q.p, q.v) == pytest.approx(1.0)


def test_cylinder_strip_boundary_chart_has_one_inward_direction(cylinder_strip):
    points = sample_chart_boundary(cylinder_strip, SURFACE, sign=1, grid=2, times=(0.0,))
    assert len(points) == 2
    for q in points:
        assert q.chart == ChartKind.PLUS_BOUNDARY
        # inward: the spatial velocity points away from the wall at |x| = 1
        assert q.v[1] * q.p[1] < 0.0
    glued = glue_charts(points, sample_chart_boundary(cylinder_strip, SURFACE, sign=-1, grid=2, times=(0.0,)))
    assert all(len(c.members) == 1 for c in glued.classes)


def test_minkowski_has_empty_boundary_charts():
    assert sample_chart_boundary(make_minkowski(n=2), SURFACE, sign=1) == []


def test_identify_swaps_interior_charts_and_fixes_boundary_points(cylinder_strip):
    q = sample_chart_interior(cylinder_strip, SURFACE, grid=3, dirs=2, sign=1)[0]
    assert identify(q).chart == ChartKind.MINUS_INTERIOR
    assert identify(identify(q)) == q
    b = sample_chart_boundary(cylinder_strip, SURFACE, sign=1, grid=1, times=(0.0,))[0]
    assert identify(b) == b


def test_gluing_rejects_mismatched_grids(cylinder_strip):
    plus = sample_chart_interior(cylinder_strip, SURFACE, grid=5, dirs=2, sign=1)
    minus = sample_chart_interior(cylinder_strip, SURFACE, grid=4, dirs=2, sign=-1)
    with pytest.raises(GridMismatchError):
        glue_charts(plus, minus)
    with pytest.raises(GridMismatchError):
        glue_charts(plus, [])


def test_transition_map_carries_boundary_points_to_a_later_surface(cylinder_strip):
    q = sample_chart_boundary(cylinder_strip, SURFACE, sign=1, grid=1, times=(0.5,))[0]
    moved = transition_map(cylinder_strip, q, CauchySurface(level=2.0))
    assert moved.chart == ChartKind.PLUS_INTERIOR
    assert moved.p[0] == pytest.approx(2.0)
    assert abs(moved.p[1]) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(DomainError):
        transition_map(cylinder_strip, q, CauchySurface(level=-1.0))


def test_tracing_requires_lightlike_representatives(minkowski):
    q = LightspacePoint(chart=ChartKind.PLUS_INTERIOR, point=[0.0, 0.0, 0.0], direction=[1.0, 0.5, 0.0],
                        coordinates=[0.0, 0.0, 0.0])
    with pytest.raises(NotLightlikeError):
        trace_lightspace_point(minkowski, q, 1.0)


def test_distinct_null_lines_are_separated(minkowski):
    first = LightspacePoint(chart=ChartKind.PLUS_INTERIOR, point=[0.0, 0.0, 0.0], direction=[1.0, 1.0, 0.0],
                            coordinates=[0.0, 0.0, 0.0])
    second = first.model_copy(update={"point": [0.0, 0.0, 1.0]})
    gap = image_separation(trace_lightspace_point(minkowski, first, 1.0),
                           trace_lightspace_point(minkowski, second, 1.0))
    assert gap == pytest.approx(1.0, abs=1e-9)


def test_cone_surface_certificate_validates_and_detects_tampering():
    family, candidates = cone_surface_construction()
    cert = detect_nonhausdorff(build_model("product_cone_surface"), family, candidates, horizon=2.0, threshold=1e-4)
    assert cert is not None
    assert validate_certificate(cert)
    assert max(cert.evidence[-1].d_a, cert.evidence[-1].d_b) < 1e-4
    assert cert.separation > 1e-3
    tampered = cert.model_copy(update={"separation": cert.separation + 1.0})
    assert not validate_certificate(tampered)


def test_family_that_moves_away_and_back_is_not_certified():
    family, candidates = cone_surface_construction(ks=(1e5, 2.0, 1e5))
    model = build_model("product_cone_surface")
    assert detect_nonhausdorff(model, family, candidates, horizon=2.0, threshold=1e-4) is None


def test_certificate_with_increasing_distances_fails_validation():
    family, candidates = cone_surface_construction()
    cert = detect_nonhausdorff(build_model("product_cone_surface"), family, candidates, horizon=2.0, threshold=1e-4)
    assert cert is not None
    distances = [max(e.d_a, e.d_b) for e in cert.evidence]
    assert all(b < a for a, b in zip(distances, distances[1:]))
    # swapping the first two members keeps the final member and every stored distance
    order = [1, 0, *range(2, len(cert.family))]
    reordered = cert.model_copy(update={
        "family": [cert.family[i] for i in order],
        "family_gauges": [cert.family_gauges[i] for i in order],
        "evidence": [cert.evidence[i] for i in order],
    })
    assert not validate_certificate(reordered)


def test_minkowski_lines_give_no_certificate():
    family, candidates = cone_surface_construction()
    assert detect_nonhausdorff(make_minkowski(n=2), family, candidates, horizon=2.0, threshold=1e-4) is None
