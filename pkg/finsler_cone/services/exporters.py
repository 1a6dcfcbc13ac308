import json
import logging
from pathlib import Path
from typing import Literal

import polars as pl

from finsler_cone.schemas.boundary import ConvexityReport
from finsler_cone.schemas.geodesics import GeodesicSolution

logger = logging.getLogger(__name__)

ExportFormat = Literal["jsonl", "csv"]


def trajectory_frame(solution: GeodesicSolution) -> pl.DataFrame:
    """Columns t, x0..xn, v0..vn, one row per stored sample."""
    dim = len(solution.samples[0].x) if solution.samples else 0
    columns = {"t": solution.params.tolist()}
    points, velocities = solution.points, solution.velocities
    for k in range(dim):
        columns[f"x{k}"] = points[:, k].tolist()
    for k in range(dim):
        columns[f"v{k}"] = velocities[:, k].tolist()
    return pl.DataFrame(columns, schema={name: pl.Float64 for name in columns})


def render_trajectory(solution: GeodesicSolution, format: ExportFormat = "jsonl") -> str:
    """JSONL: one record per sample, then the summary record. CSV: the trajectory frame."""
    if format == "csv":
        return trajectory_frame(solution).write_csv()
    if format == "jsonl":
        lines = [json.dumps(sample.model_dump(), sort_keys=True) for sample in solution.samples]
        lines.append(json.dumps(solution.summary(), sort_keys=True))
        return "\n".join(lines) + "\n"
    raise ValueError(f"Unknown export format {format}")


def export_trajectory(solution: GeodesicSolution, path: str | Path, format: ExportFormat = "jsonl") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_trajectory(solution, format))
    logger.info(f"Exported {len(solution.samples)} samples of {solution.model_name} to {path} ({format})")
    return path


def convexity_frame(report: ConvexityReport) -> pl.DataFrame:
    """One row per (boundary point, tangent direction) entry of a convexity report."""
    return pl.DataFrame(
        {
            "point_index": [e.point_index for e in report.entries],
            "direction_index": [e.direction_index for e in report.entries],
            "ii": [e.ii for e in report.entries],
            "verdict": [e.verdict.value for e in report.entries],
            "error": [e.error for e in report.entries],
        },
        schema={"point_index": pl.Int64, "direction_index": pl.Int64, "ii": pl.Float64,
                "verdict": pl.Utf8, "error": pl.Utf8},
    )
