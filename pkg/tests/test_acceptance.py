import json

import pytest

from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.services.acceptance import (
    CHECKS,
    AcceptanceCheck,
    CheckContext,
    Measurement,
    run_check,
    select_checks,
    verify_paper,
)

QUICK_CHECKS = [
    "ads_second_fundamental_form",
    "ads_conformal_extension",
    "asympt_ads_boundary_metric",
    "lagrangian_drift",
    "finite_difference_oracles",
    "cylinder_lightspace",
    "hausdorff_minkowski",
    "fermat_null_speed",
]


def test_manifest_names_are_unique_and_ordered():
    names = [spec.name for spec in CHECKS]
    assert len(names) == len(set(names)) == 19
    assert names[0] == "ads_second_fundamental_form"
    assert names[-1] == "fermat_convexity_correspondence"


def test_selection_by_tag_and_name():
    assert len(select_checks(["ads"])) == 7
    assert [s.name for s in select_checks(["cylinder_lightspace"])] == ["cylinder_lightspace"]
    assert select_checks(None) == CHECKS
    assert {s.name for s in select_checks(["nonhausdorff"])} == {
        "nonhausdorff_cone_surface", "nonhausdorff_slit_plane", "hausdorff_minkowski", "hausdorff_cylinder_strip"}


@pytest.mark.parametrize("name", QUICK_CHECKS)
def test_quick_checks_pass(name):
    report = verify_paper([name])
    assert [c.name for c in report.checks] == [name]
    assert report.passed, report.checks[0].model_dump()


def test_tight_override_fails_the_check():
    report = verify_paper(["ads_second_fundamental_form"], tolerance_override=1e-20)
    assert not report.passed
    assert report.failed == ["ads_second_fundamental_form"]
    assert all(c.tolerance == 1e-20 for c in report.checks[0].criteria)


def test_raising_check_is_reported_as_error():
    def explode(ctx: CheckContext) -> Measurement:
        raise RuntimeError("boom")

    spec = AcceptanceCheck(name="explode", tags=["test"], description="always raises", run=explode)
    result = run_check(spec, CheckContext(tol=ToleranceConfig()))
    assert result.status == "error"
    assert not result.passed
    assert "boom" in result.message


def test_non_finite_values_fail():
    spec = AcceptanceCheck(name="nan", tags=[], description="nan value",
                           run=lambda ctx: Measurement(criteria=[("gap", float("nan"), 1.0)]))
    assert run_check(spec, CheckContext(tol=ToleranceConfig())).status == "failed"


def test_report_is_deterministic():
    first = verify_paper(["ads_conformal_extension", "cylinder_lightspace"], seed=3)
    second = verify_paper(["ads_conformal_extension", "cylinder_lightspace"], seed=3)
    assert json.dumps(first.model_dump(mode="json"), sort_keys=True) == \
        json.dumps(second.model_dump(mode="json"), sort_keys=True)


@pytest.mark.slow
def test_ads_suite_passes():
    report = verify_paper(["ads"], jobs=2)
    assert len(report.checks) == 7
    assert report.passed, report.failed


@pytest.mark.slow
def test_full_suite_passes():
    report = verify_paper(jobs=4)
    assert report.passed, report.failed
