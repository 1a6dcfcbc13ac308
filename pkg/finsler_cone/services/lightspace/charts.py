"""Cauchy-surface and boundary charts of the space of cone geodesics."""
import logging
import math
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import null_space

from finsler_cone.core.errors import (
    NonTimelikeBoundaryError,
    NotInwardError,
    NotProductFormError,
)
from finsler_cone.models.base import SpacetimeModel
from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.schemas.lightspace import CauchySurface, ChartKind, LightspacePoint
from finsler_cone.services.boundary_analysis import boundary_points
from finsler_cone.services.geometry_core import boundary_frame, cone_direction_solve, eval_L, resolve_tolerances
from finsler_cone.utils.autodiff import scalar_value
from finsler_cone.utils.sampling import hyperspherical_angles, sphere_directions

logger = logging.getLogger(__name__)

Grid = Union[int, Sequence[Sequence[float]]]


def require_product_form(model: SpacetimeModel) -> int:
    if model.temporal_index is None:
        raise NotProductFormError(f"Model {model.name} has no product-form temporal coordinate")
    return model.temporal_index


def _spatial(model: SpacetimeModel, x: np.ndarray) -> np.ndarray:
    return np.delete(np.asarray(x, dtype=float), model.temporal_index)


def _with_time(model: SpacetimeModel, spatial: Sequence[float], t: float) -> np.ndarray:
    return np.insert(np.asarray(spatial, dtype=float), model.temporal_index, t)


def gauged(model: SpacetimeModel, p: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Representative of R+ v with Omega(v) = 1."""
    return v / model.omega(p, v)


def surface_grid(model: SpacetimeModel, surface: CauchySurface, count: int) -> List[np.ndarray]:
    """Interior points of the Cauchy surface on a regular spatial grid (cell midpoints)."""
    index = require_product_form(model)
    lower = [b if math.isfinite(b) else -1.0 for k, b in enumerate(model.lower) if k != index]
    upper = [b if math.isfinite(b) else 1.0 for k, b in enumerate(model.upper) if k != index]
    per_axis = max(1, math.ceil(count ** (1.0 / len(lower))))
    axes = [lo + (np.arange(per_axis) + 0.5) * (hi - lo) / per_axis for lo, hi in zip(lower, upper)]
    points = []
    for spatial in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lower)):
        p = _with_time(model, spatial, surface.level)
        if not model.in_domain(p):
            continue
        if model.boundary is not None and scalar_value(model.boundary, p) <= 0.0:
            continue
        points.append(p)
    return points


def interior_chart_point(model: SpacetimeModel, chart: ChartKind, p: np.ndarray, v: np.ndarray) -> LightspacePoint:
    """Chart point over p; coordinates are the spatial base point and the angles of the spatial direction."""
    v = gauged(model, p, v)
    spatial_v = _spatial(model, v)
    norm = float(np.linalg.norm(spatial_v))
    angles = hyperspherical_angles(spatial_v / norm) if norm > 0.0 else []
    return LightspacePoint(chart=chart, point=p.tolist(), direction=v.tolist(),
                           coordinates=[*_spatial(model, p).tolist(), *angles])


def sample_chart_interior(model: SpacetimeModel, surface: CauchySurface, grid: Grid = 9, dirs: int = 8,
                          sign: int = 1, tol: Optional[ToleranceConfig] = None, seed: int = 0) -> List[LightspacePoint]:
    """One point of ell^+_S (sign +1) or ell^-_S (sign -1) per surface grid point and cone direction.

    Directions are stored through their future representative, so the two charts
    sampled with the same arguments describe the same geodesics.
    """
    tol = resolve_tolerances(tol)
    index = require_product_form(model)
    chart = ChartKind.PLUS_INTERIOR if sign > 0 else ChartKind.MINUS_INTERIOR
    if isinstance(grid, int):
        points = surface_grid(model, surface, grid)
    else:
        points = []
        for spatial in grid:
            spatial = np.asarray(spatial, dtype=float)
            points.append(spatial if spatial.shape[0] == model.dim else _with_time(model, spatial, surface.level))

    result = []
    for p in points:
        if abs(p[index] - surface.level) > 1e-12 * max(1.0, abs(surface.level)):
            raise NotProductFormError(f"Point {p.tolist()} is not on the surface t = {surface.level}")
        axis = model.axis(p)
        complement = null_space(axis[None, :])
        for e in sphere_directions(complement.shape[1], dirs, seed) @ complement.T:
            v = cone_direction_solve(model, p, e, axis, tol)
            result.append(interior_chart_point(model, chart, p, v))
    logger.debug(f"{chart.value} of {model.name}: {len(result)} points over {len(points)} base points")
    return result


def _tangent_offsets(k: int, dirs: int, seed: int) -> np.ndarray:
    """Vectors u of T(dS): zero first, then tan(alpha) e over sampled unit e."""
    if k == 0:
        return np.zeros((1, 0))
    if k == 1:
        return np.tan(np.linspace(-1.2, 1.2, 2 * (max(dirs, 2) // 2) + 1))[:, None]
    units = sphere_directions(k, max(dirs - 1, 1), seed)
    return np.vstack([np.zeros((1, k)), math.tan(0.8) * units])


def sample_chart_boundary(model: SpacetimeModel, surface: CauchySurface, sign: int = 1, grid: Grid = 8,
                          dirs: int = 5, times: Sequence[float] = (0.0, 0.5),
                          tol: Optional[ToleranceConfig] = None, seed: int = 0) -> List[LightspacePoint]:
    """Points (t, x, u) of ell^+_dM (sign +1) or ell^-_dM (sign -1).

    t ranges over surface.level + sign * times, x over boundary samples of dS and u
    over T_x(dS); the direction is the lightlike v on the ray axis + s (u + sign eta_S),
    inward for ell^+ and outward (inward into the past) for ell^-.
    """
    tol = resolve_tolerances(tol)
    index = require_product_form(model)
    chart = ChartKind.PLUS_BOUNDARY if sign > 0 else ChartKind.MINUS_BOUNDARY
    if model.boundary is None:
        logger.debug(f"{model.name} has no boundary: {chart.value} is empty")
        return []

    temporal = np.zeros(model.dim)
    temporal[index] = 1.0
    result = []
    for base in boundary_points(model, grid):
        for offset in times:
            p = np.array(base, dtype=float)
            p[index] = surface.level + sign * abs(offset)
            db, _ = boundary_frame(model, p, tol)
            axis = model.axis(p)
            if eval_L(model, p, axis) <= tol.classification * float(axis @ axis):
                raise NonTimelikeBoundaryError(f"Time axis is not timelike at boundary point {p.tolist()}")

            eta = np.array(model.rigging_at(p), dtype=float)
            eta[index] = 0.0
            if not float(db @ eta) > 0.0:
                raise NotInwardError(f"Spatial rigging is not inward at {p.tolist()}")
            tangent = null_space(np.vstack([db, temporal]))
            spatial_db = np.abs(_spatial(model, db))
            chart_x = np.delete(_spatial(model, p), int(np.argmax(spatial_db)))

            for u in _tangent_offsets(tangent.shape[1], dirs, seed):
                v = gauged(model, p, cone_direction_solve(model, p, tangent @ u + sign * eta, axis, tol))
                if not sign * float(db @ v) > 0.0:
                    raise NotInwardError(f"Direction {v.tolist()} at {p.tolist()} has the wrong side for {chart.value}")
                result.append(LightspacePoint(
                    chart=chart,
                    point=p.tolist(),
                    direction=v.tolist(),
                    coordinates=[float(p[index]), *chart_x.tolist(), *map(float, u)],
                    boundary_coordinates={"t": [float(p[index])], "x": _spatial(model, p).tolist(),
                                          "u": list(map(float, u))},
                ))
    logger.debug(f"{chart.value} of {model.name}: {len(result)} points")
    return result
