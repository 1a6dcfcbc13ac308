import json

import polars as pl
import pytest

from finsler_cone.services.boundary_analysis import classify_boundary_convexity
from finsler_cone.services.exporters import convexity_frame, export_trajectory, render_trajectory, trajectory_frame
from finsler_cone.services.geodesic_flow import integrate_geodesic


@pytest.fixture
def solution(minkowski):
    return integrate_geodesic(minkowski, [0.0, 0.0, 0.0], [1.0, 0.5, 0.0], 2.0)


def test_jsonl_ends_with_summary_record(solution):
    lines = render_trajectory(solution, "jsonl").splitlines()
    assert len(lines) == len(solution.samples) + 1
    first = json.loads(lines[0])
    assert sorted(first) == ["t", "v", "x"]
    summary = json.loads(lines[-1])
    assert summary["summary"] is True
    assert summary["termination"] == "parameter_end"
    assert summary["samples"] == len(solution.samples)


def test_csv_export_matches_trajectory_frame(solution, tmp_path):
    path = export_trajectory(solution, tmp_path / "out" / "line.csv", "csv")
    frame = pl.read_csv(path)
    assert frame.columns == ["t", "x0", "x1", "x2", "v0", "v1", "v2"]
    assert frame.height == len(solution.samples)
    assert frame["x1"].to_list() == pytest.approx((0.5 * frame["t"]).to_list(), abs=1e-9)
    expected = trajectory_frame(solution)
    for column in expected.columns:
        assert frame[column].to_list() == pytest.approx(expected[column].to_list(), rel=1e-12, abs=1e-15)


def test_rendering_is_deterministic(solution):
    assert render_trajectory(solution) == render_trajectory(solution)


def test_unknown_format_is_rejected(solution):
    with pytest.raises(ValueError):
        render_trajectory(solution, "parquet")


def test_convexity_frame_has_one_row_per_entry(ads_conformal):
    report = classify_boundary_convexity(ads_conformal, "light", grid=4, dirs=2)
    frame = convexity_frame(report)
    assert frame.height == len(report.entries) == 8
    assert set(frame["verdict"].to_list()) == {"convex"}
