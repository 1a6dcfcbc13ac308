import numpy as np

from finsler_cone.models.catalog import CATALOG, build_model
from finsler_cone.services.acceptance import ORACLE_SAMPLES
from finsler_cone.utils.autodiff import fundamental_matrix
from finsler_cone.utils.finite_differences import fd_fundamental_matrix, fd_metric_derivative, relative_gap


def test_oracle_samples_cover_the_catalog():
    assert set(ORACLE_SAMPLES) == set(CATALOG)


def test_autodiff_tensor_matches_differenced_lagrangian():
    for name, (p, v) in ORACLE_SAMPLES.items():
        model = build_model(name, CATALOG[name].params)
        auto = fundamental_matrix(model.lagrangian, np.asarray(p, dtype=float), np.asarray(v, dtype=float))
        assert relative_gap(auto, fd_fundamental_matrix(model.lagrangian, p, v)) < 1e-5, name


def test_metric_derivative_of_ads():
    model = build_model("ads", {"n": 2, "region": "full"})
    r = 1.5
    dg = fd_metric_derivative(model.lagrangian, [0.0, r, 0.3], [1.0, 0.2, 0.1])
    # d/dr of diag(1 + r^2, -1 / (1 + r^2), -r^2)
    expected = [2.0 * r, 2.0 * r / (1.0 + r * r) ** 2, -2.0 * r]
    np.testing.assert_allclose(np.diag(dg[:, :, 1]), expected, rtol=1e-7)
    assert np.max(np.abs(dg[:, :, 0])) < 1e-8


def test_relative_gap_uses_unit_floor():
    assert relative_gap(np.zeros(3), np.full(3, 1e-3)) == 1e-3
    assert relative_gap(np.array([100.0]), np.array([101.0])) == 0.01
