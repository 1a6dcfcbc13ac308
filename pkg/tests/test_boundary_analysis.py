import math

import numpy as np
import pytest

from conftest import ads_light_tangent
from finsler_cone.core.errors import NotInwardError, NotTangentError
from finsler_cone.models.ads import make_ads
from finsler_cone.models.cone_triple import make_perturbed_half_space
from finsler_cone.models.products import make_minkowski, make_stationary
from finsler_cone.schemas.boundary import ProbeOutcome, RiggingField, Verdict
from finsler_cone.services.boundary_analysis import (
    classify_boundary_convexity,
    consistency_suite,
    model_rigging,
    rigging_invariance_check,
    second_fundamental_form,
    tangent_geodesic_probe,
)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 5.0])
def test_ads_second_fundamental_form(r):
    model = make_ads(n=2, region="inner", r0=r)
    p = [0.0, r, 0.3]
    for sign in (1.0, -1.0):
        ii = second_fundamental_form(model, p, None, ads_light_tangent(r, sign))
        assert ii == pytest.approx(math.sqrt(1.0 + r * r) / r, rel=1e-6)


def test_second_fundamental_form_rejects_bad_input(ads_inner):
    p = [0.0, 1.0, 0.3]
    with pytest.raises(NotTangentError):
        second_fundamental_form(ads_inner, p, None, [1.0, 0.5, 0.0])
    with pytest.raises(NotInwardError):
        second_fundamental_form(ads_inner, p, RiggingField.constant([0.0, 1.0, 0.0]), ads_light_tangent(1.0))


def test_rigging_change_rescales_second_fundamental_form(ads_inner):
    p = [0.0, 1.0, 0.3]
    base = model_rigging(ads_inner)
    other = base.scaled(3.0).shifted(lambda x: np.array([0.7, 0.0, -0.2]))
    result = rigging_invariance_check(ads_inner, p, base, other, ads_light_tangent(1.0))
    assert result.signs_agree
    assert result.relation_error < 1e-8
    assert result.ratio == pytest.approx(1.0 / 3.0)


def test_half_space_is_totally_geodesic():
    model = make_minkowski(n=2, half_space=True)
    report = classify_boundary_convexity(model, "light", grid=6, dirs=2)
    assert report.summary.verdict == Verdict.CONVEX
    assert report.summary.totally_geodesic
    assert len(report.entries) == 12


def test_disk_and_disk_exterior_verdicts():
    interior = classify_boundary_convexity(make_stationary(domain="disk"), "light", grid=8, dirs=2)
    exterior = classify_boundary_convexity(make_stationary(domain="disk_exterior"), "light", grid=8, dirs=2)
    assert interior.summary.verdict == Verdict.CONVEX
    assert interior.summary.min_ii > 0.0
    assert exterior.summary.verdict == Verdict.STRICTLY_CONCAVE


def test_parallel_classification_matches_serial(ads_conformal):
    serial = classify_boundary_convexity(ads_conformal, "light", grid=6, dirs=2)
    threaded = classify_boundary_convexity(ads_conformal, "light", grid=6, dirs=2, jobs=3)
    assert [e.ii for e in serial.entries] == [e.ii for e in threaded.entries]


def test_ads_probe_leaves_the_manifold(ads_inner):
    # II > 0 on {r = 1}: the tangent geodesic escapes through r > 1
    result = tangent_geodesic_probe(ads_inner, [0.0, 1.0, 0.3], ads_light_tangent(1.0), horizon=0.2)
    assert result.outcome == ProbeOutcome.EXITS_MANIFOLD


def test_probe_agrees_with_sign_on_random_half_spaces():
    report = consistency_suite(seeds=range(12))
    assert report.considered > 0
    assert report.passed


def test_perturbed_half_space_is_reproducible():
    first = make_perturbed_half_space(7, "randers")
    second = make_perturbed_half_space(7, "randers")
    p = first.boundary_sampler(1)[0]
    assert np.array_equal(p, second.boundary_sampler(1)[0])
