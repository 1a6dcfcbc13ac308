import numpy as np
import pytest

from finsler_cone.core.errors import BracketError, ConeDomainError, NotOnBoundaryError
from finsler_cone.schemas.geometry import CausalClass, ToleranceConfig
from finsler_cone.services.geometry_core import (
    boundary_frame,
    causal_classify,
    cone_direction_solve,
    eval_L,
    fundamental_tensor,
    homogeneity_check,
    sample_boundary_tangents,
    signature_check,
)


def test_minkowski_causal_classes(minkowski):
    p = [0.0, 0.0, 0.0]
    assert causal_classify(minkowski, p, [1.0, 0.2, 0.0]) == CausalClass.TIMELIKE
    assert causal_classify(minkowski, p, [1.0, 1.0, 0.0]) == CausalClass.LIGHTLIKE
    assert causal_classify(minkowski, p, [0.2, 1.0, 0.0]) == CausalClass.SPACELIKE
    # past-directed lightlike vectors are not in the future cone
    assert causal_classify(minkowski, p, [-1.0, 1.0, 0.0]) == CausalClass.SPACELIKE


def test_classification_band_scales_with_tolerance(minkowski):
    v = [1.0, 1.0 - 1e-7, 0.0]
    assert causal_classify(minkowski, [0, 0, 0], v) == CausalClass.TIMELIKE
    assert causal_classify(minkowski, [0, 0, 0], v, ToleranceConfig().overridden(1e-5)) == CausalClass.LIGHTLIKE


def test_minkowski_fundamental_tensor_is_diagonal(minkowski):
    value = fundamental_tensor(minkowski, [0.0, 1.0, 2.0], [2.0, 0.5, 0.1])
    np.testing.assert_allclose(value.as_array(), np.diag([1.0, -1.0, -1.0]), atol=1e-12)
    assert value.determinant == pytest.approx(1.0)
    assert value.base.causal_class == CausalClass.TIMELIKE


def test_randers_tensor_is_homogeneous_of_degree_zero(randers_triple):
    p, v = [0.0, 0.0, 0.0], [1.0, 0.3, -0.2]
    g1 = fundamental_tensor(randers_triple, p, v).as_array()
    g2 = fundamental_tensor(randers_triple, p, 3.7 * np.asarray(v)).as_array()
    np.testing.assert_allclose(g1, g2, atol=1e-10)


def test_randers_axis_is_excluded_for_derivatives_only(randers_triple):
    p, axis = [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]
    assert eval_L(randers_triple, p, axis) == pytest.approx(1.0)
    with pytest.raises(ConeDomainError):
        fundamental_tensor(randers_triple, p, axis)


def test_randers_derivatives_are_available_off_the_axis_only(randers_triple):
    p = [0.0, 0.0, 0.0]
    assert not randers_triple.derivatives_available(p, [1.0, 0.0, 0.0])
    assert randers_triple.derivatives_available(p, [1.0, 0.3, 0.2])


def test_cone_direction_solve_finds_lightlike_root(ads_full):
    p = [0.0, 2.0, 0.3]
    v = cone_direction_solve(ads_full, p, [0.0, 1.0, 0.0])
    assert abs(eval_L(ads_full, p, v)) <= 1e-10 * float(v @ v)
    assert v[0] == pytest.approx(1.0)
    assert v[1] == pytest.approx(5.0)


def test_cone_direction_solve_rejects_axis_parallel_seed(minkowski):
    with pytest.raises(BracketError):
        cone_direction_solve(minkowski, [0, 0, 0], [2.0, 0.0, 0.0])


def test_boundary_frame_rejects_interior_points(ads_inner):
    with pytest.raises(NotOnBoundaryError):
        boundary_frame(ads_inner, [0.0, 0.5, 0.3])


def test_boundary_light_tangents_are_lightlike_and_tangent(ads_inner):
    p = [0.0, 1.0, 0.3]
    tangents = sample_boundary_tangents(ads_inner, p, "light", 2)
    assert len(tangents) == 2
    for w in tangents:
        assert abs(w[1]) < 1e-12
        assert causal_classify(ads_inner, p, w) == CausalClass.LIGHTLIKE


def test_signature_and_homogeneity(randers_triple):
    points = [[0.0, 0.1, -0.2], [1.0, 0.5, 0.5]]
    assert signature_check(randers_triple, points, samples=40) == {"passed": 40, "failed": 0}
    assert homogeneity_check(randers_triple, points, samples=100) < 1e-10
