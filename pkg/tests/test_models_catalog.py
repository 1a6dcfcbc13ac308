import json
import math

import pytest

from finsler_cone.core.errors import DecayViolationError, ModelDefinitionError
from finsler_cone.models.ads import DecayProfile, make_ads_conformal, make_asympt_ads, r_of_z, z_of_r, z_star
from finsler_cone.models.catalog import CATALOG, build_model, catalog_entries, describe, load_model
from finsler_cone.services.geometry_core import eval_L


def test_every_catalog_entry_builds():
    names = [entry.name for entry in catalog_entries()]
    assert names == sorted(CATALOG)
    for name in names:
        model = load_model(name)
        assert model.name == name
        assert describe(name)["model"]["dim"] == model.dim


def test_conformal_ads_extends_to_the_boundary():
    assert z_star() == pytest.approx(math.asinh(0.5), abs=1e-12)
    assert z_of_r(r_of_z(0.2)) == pytest.approx(0.2, abs=1e-12)
    model = make_ads_conformal()
    # f(z) = L((0, z, 0.3), (1, 0, 0)) equals 1 on {z = z_*}
    assert eval_L(model, [0.0, z_star() - 1e-9, 0.3], [1.0, 0.0, 0.0]) == pytest.approx(1.0, abs=1e-8)


def test_unknown_builtin_is_rejected():
    with pytest.raises(ModelDefinitionError):
        build_model("schwarzschild")
    with pytest.raises(ModelDefinitionError):
        describe("schwarzschild")


def test_model_definition_file(tmp_path):
    path = tmp_path / "ads.json"
    path.write_text(json.dumps({"name": "small_ads", "dim": 3, "builtin": "ads",
                                "params": {"n": 2, "region": "inner", "r0": 2.0}}), encoding="utf-8")
    model = load_model(str(path))
    assert model.params["r0"] == 2.0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad", "dim": 4, "builtin": "ads", "params": {"n": 2}}), encoding="utf-8")
    with pytest.raises(ModelDefinitionError):
        load_model(str(bad))

    expression = tmp_path / "expr.json"
    expression.write_text(json.dumps({"name": "expr", "expression": "v0**2 - v1**2"}), encoding="utf-8")
    with pytest.raises(ModelDefinitionError):
        load_model(str(expression))


def test_bad_builtin_parameters_are_reported():
    with pytest.raises(ModelDefinitionError):
        build_model("ads", {"n": 1})
    with pytest.raises(ModelDefinitionError):
        build_model("stationary", {"domain": "torus"})


def test_asymptotic_profile_must_decay():
    assert make_asympt_ads(profile=DecayProfile(kind="power", power=2.0)).name == "asympt_ads"
    with pytest.raises(DecayViolationError):
        make_asympt_ads(profile=DecayProfile(kind="constant"))
