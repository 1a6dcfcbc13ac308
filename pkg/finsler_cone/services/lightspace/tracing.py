import logging
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from finsler_cone.core.errors import DomainError, InvalidInitialDataError, NotLightlikeError
from finsler_cone.models.base import SpacetimeModel
from finsler_cone.schemas.geodesics import GeodesicSolution, IntegrationOptions
from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.schemas.lightspace import CauchySurface, ChartKind, LightspacePoint
from finsler_cone.services.geodesic_flow import densified_points, integrate_both_ways, integrate_geodesic
from finsler_cone.services.geometry_core import resolve_tolerances
from finsler_cone.services.lightspace.charts import interior_chart_point, require_product_form
from finsler_cone.utils.autodiff import lagrangian_value
from finsler_cone.utils.curves import hausdorff_distance

logger = logging.getLogger(__name__)


def _validate_point(model: SpacetimeModel, q: LightspacePoint, tol: ToleranceConfig) -> None:
    p, v = q.p, q.v
    if p.shape != (model.dim,) or v.shape != (model.dim,):
        raise InvalidInitialDataError(f"{model.name} expects {model.dim} components")
    value = lagrangian_value(model.lagrangian, p, v)
    if abs(value) > tol.classification * max(1.0, float(v @ v)):
        raise NotLightlikeError(f"Lightspace representative is not lightlike: L = {value:.3e}")
    if abs(model.omega(p, v) - 1.0) > 1e-10:
        raise InvalidInitialDataError(f"Representative violates the gauge Omega(v) = 1: {model.omega(p, v)}")


def trace_lightspace_point(model: SpacetimeModel, q: LightspacePoint, horizon: float,
                           opts: Optional[IntegrationOptions] = None,
                           tol: Optional[ToleranceConfig] = None) -> GeodesicSolution:
    """Maximal integrated representative of the cone geodesic through q, both ways."""
    tol = resolve_tolerances(tol)
    _validate_point(model, q, tol)
    return integrate_both_ways(model, q.p, q.v, horizon, opts, tol)


def image_separation(first: GeodesicSolution, second: GeodesicSolution, per_step: int = 64) -> float:
    """Hausdorff distance between the images of two traced geodesics."""
    return hausdorff_distance(densified_points(first, per_step), densified_points(second, per_step))


def transition_map(model: SpacetimeModel, q: LightspacePoint, surface: CauchySurface, horizon: float = 10.0,
                   opts: Optional[IntegrationOptions] = None,
                   tol: Optional[ToleranceConfig] = None) -> LightspacePoint:
    """Carry a boundary-chart point to the interior chart of another Cauchy surface.

    ell^+_dM points flow to the future, ell^-_dM points to the past; the surface
    must lie on that side of q.
    """
    tol = resolve_tolerances(tol)
    index = require_product_form(model)
    _validate_point(model, q, tol)
    sign = q.chart.sign
    if sign * (surface.level - q.p[index]) <= 0.0:
        raise DomainError(f"Surface t = {surface.level} is not to the {'future' if sign > 0 else 'past'} of q")

    solution = integrate_geodesic(model, q.p, sign * q.v, horizon, opts, tol)
    times = solution.points[:, index]
    ahead = np.nonzero(sign * (times - surface.level) >= 0.0)[0]
    if ahead.size == 0:
        raise DomainError(f"Geodesic of {q.chart.value} point ends ({solution.termination.value}) "
                          f"before reaching t = {surface.level}")
    k = int(ahead[0])
    lo, hi = float(solution.params[k - 1]), float(solution.params[k])

    def level_gap(s: float) -> float:
        return sign * (float(solution.evaluate(s)[0, index]) - surface.level)

    s = hi if level_gap(hi) == 0.0 else brentq(level_gap, lo, hi, xtol=1e-14 * max(1.0, hi))
    state = solution.evaluate(s)[0]
    p, w = state[:model.dim], state[model.dim:]
    p[index] = surface.level
    chart = ChartKind.PLUS_INTERIOR if sign > 0 else ChartKind.MINUS_INTERIOR
    logger.debug(f"transition {q.chart.value} -> {chart.value} at parameter {s:.6g}")
    return interior_chart_point(model, chart, p, sign * w)
