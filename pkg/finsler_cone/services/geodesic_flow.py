"""Geodesic shooting with boundary, domain and chart-transition events."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import torch
from scipy.integrate import DOP853, cumulative_trapezoid
from scipy.optimize import brentq, minimize_scalar

from finsler_cone.core.errors import (
    DegenerateTensorError,
    InvalidInitialDataError,
    NotAGeodesicError,
    NotLightlikeError,
    NotStationaryError,
    StiffnessError,
)
from finsler_cone.models.ads import z_of_r
from finsler_cone.models.base import SpacetimeModel, StationaryData, conformal_model
from finsler_cone.schemas.geodesics import (
    BoundaryHit,
    ConformalDeviation,
    GeodesicSolution,
    Incidence,
    InitialData,
    IntegrationOptions,
    Termination,
    TrajectorySample,
)
from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.services.connection import euler_lagrange_spray
from finsler_cone.services.geometry_core import resolve_tolerances
from finsler_cone.utils.autodiff import lagrangian_value, scalar_value, scalar_value_and_gradient, to_tensor
from finsler_cone.utils.curves import (
    cumulative_arc_length,
    max_distance_to_polyline,
    split_pieces,
)

logger = logging.getLogger(__name__)

EVENT_NODES = 8

EventFunction = Callable[[np.ndarray], float]
ChartMap = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


class GeodesicIntegrator:
    """DOP853 stepper for x'' = -G(x, x') with event localization on the dense output.

    Events are scanned at EVENT_NODES points per accepted step; an interior dip
    between nodes is refined with a bounded minimization before the crossing is
    bracketed and solved with brentq.
    """

    def __init__(self, model: SpacetimeModel, tol: Optional[ToleranceConfig] = None,
                 opts: Optional[IntegrationOptions] = None):
        self.model = model
        self.tol = resolve_tolerances(tol)
        self.opts = opts or IntegrationOptions()
        self.dim = model.dim
        self.rtol = self.opts.rtol or self.tol.ode_rtol
        self.atol = self.opts.atol or self.tol.ode_atol
        self.max_steps = self.opts.max_steps or self.tol.max_steps
        self.max_step = self.opts.max_step or model.max_step or np.inf

    # -- right-hand side ----------------------------------------------------
    def _rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        x, v = y[:self.dim], y[self.dim:]
        try:
            acceleration = -euler_lagrange_spray(self.model, x, v, self.tol.degeneracy_floor)
        except DegenerateTensorError:
            return np.full(2 * self.dim, np.nan)
        return np.concatenate([v, acceleration])

    def _solver(self, t0: float, y0: np.ndarray, t_max: float) -> DOP853:
        return DOP853(self._rhs, t0, y0, t_max, rtol=self.rtol, atol=self.atol, max_step=self.max_step)

    # -- events -------------------------------------------------------------
    def _events(self, slack: float) -> List[Tuple[str, EventFunction, float]]:
        events = []
        model = self.model
        if self.opts.boundary_events and model.boundary is not None:
            events.append(("boundary", lambda x: scalar_value(model.boundary, x), -slack))
        bounded = any(math.isfinite(b) for b in model.lower + model.upper)
        if self.opts.domain_events and (bounded or model.domain_fns):
            events.append(("domain", model.domain_margin, 0.0))
        if model.transition is not None:
            events.append(("transition", model.transition.event, 0.0))
        return events

    @staticmethod
    def _locate(h: Callable[[float], float], s_a: float, s_b: float, h_a: float) -> float:
        if h_a <= 0.0:
            return s_a
        return brentq(h, s_a, s_b, xtol=1e-12 * max(1.0, abs(s_b)), rtol=4.0 * np.finfo(float).eps, maxiter=200)

    def _scan(self, fn: EventFunction, threshold: float, dense, t_a: float, t_b: float,
              f_a: float) -> Optional[float]:
        def h(s: float) -> float:
            return fn(dense(s)[:self.dim])

        nodes = np.linspace(t_a, t_b, EVENT_NODES + 1)
        values = [f_a] + [h(s) for s in nodes[1:]]
        for j in range(1, len(nodes)):
            if values[j] < threshold:
                return self._locate(h, nodes[j - 1], nodes[j], values[j - 1])

        # dip between nodes
        j = int(np.argmin(values))
        if 0 < j < len(nodes) - 1 and values[j] < values[j - 1] and values[j] < values[j + 1]:
            res = minimize_scalar(h, bounds=(nodes[j - 1], nodes[j + 1]), method="bounded",
                                  options={"xatol": 1e-12 * max(1.0, abs(t_b))})
            if res.fun < threshold:
                return self._locate(h, nodes[j - 1], float(res.x), values[j - 1])
        return None

    # -- helpers ------------------------------------------------------------
    def _incidence(self, x: np.ndarray, v: np.ndarray) -> Tuple[Incidence, float]:
        _, db = scalar_value_and_gradient(self.model.boundary, x)
        rate = float(db @ v) / (float(np.linalg.norm(v)) * float(np.linalg.norm(db)))
        if abs(rate) <= self.tol.dead_band:
            return Incidence.TANGENTIAL, rate
        return (Incidence.TRANSVERSAL_INWARD if rate > 0.0 else Incidence.TRANSVERSAL_OUTWARD), rate

    def _boundary_hit(self, t: float, x: np.ndarray, v: np.ndarray) -> BoundaryHit:
        incidence, rate = self._incidence(x, v)
        return BoundaryHit(t=t, point=x.tolist(), velocity=v.tolist(), incidence=incidence, normalized_rate=rate)

    def _validate(self, p0: np.ndarray, v0: np.ndarray, t_max: float) -> None:
        if p0.shape != (self.dim,) or v0.shape != (self.dim,):
            raise InvalidInitialDataError(f"{self.model.name} expects {self.dim} components")
        if not (np.all(np.isfinite(p0)) and np.all(np.isfinite(v0))) or not np.any(v0):
            raise InvalidInitialDataError(f"Initial data must be finite with v0 != 0, got {p0.tolist()}, {v0.tolist()}")
        if not t_max > 0.0:
            raise InvalidInitialDataError(f"t_max must be positive, got {t_max}")
        if not self.model.in_domain(p0):
            raise InvalidInitialDataError(f"p0 = {p0.tolist()} is outside the domain of {self.model.name}")
        if not self.model.derivatives_available(p0, v0):
            raise InvalidInitialDataError(f"v0 = {v0.tolist()} lies where derivatives of L are unavailable")

    def _finish(self, samples: List[TrajectorySample], termination: Termination, dense_pieces: list,
                chart_breaks: List[int], boundary_hit: Optional[BoundaryHit] = None,
                inextendible: bool = False, message: Optional[str] = None) -> GeodesicSolution:
        initial = lagrangian_value(self.model.lagrangian, samples[0].x, samples[0].v)
        drift = max(abs(lagrangian_value(self.model.lagrangian, s.x, s.v) - initial) for s in samples)
        solution = GeodesicSolution(
            model_name=self.model.name,
            samples=samples,
            termination=termination,
            boundary_hit=boundary_hit,
            lagrangian_initial=initial,
            lagrangian_drift=drift,
            chart_breaks=chart_breaks,
            inextendible=inextendible or boundary_hit is not None,
            message=message,
        )
        solution.attach_dense(dense_pieces)
        logger.debug(f"{self.model.name}: {termination.value} after {len(samples)} samples, drift {drift:.2e}")
        return solution

    # -- main loop ----------------------------------------------------------
    def integrate(self, p0, v0, t_max: float) -> GeodesicSolution:
        p0, v0 = np.asarray(p0, dtype=float), np.asarray(v0, dtype=float)
        self._validate(p0, v0, t_max)
        dim = self.dim
        slack = self.tol.event_tol * max(1.0, float(np.linalg.norm(p0)))
        samples = [TrajectorySample(t=0.0, x=p0.tolist(), v=v0.tolist())]
        dense_pieces: list = []
        chart_breaks: List[int] = []

        if self.opts.boundary_events and self.model.boundary is not None:
            b0 = scalar_value(self.model.boundary, p0)
            if b0 < -slack:
                raise InvalidInitialDataError(f"p0 = {p0.tolist()} lies outside the region b >= 0 (b = {b0:.3e})")
            if abs(b0) <= slack:
                hit = self._boundary_hit(0.0, p0, v0)
                if hit.incidence == Incidence.TRANSVERSAL_OUTWARD:
                    return self._finish(samples, Termination.BOUNDARY_HIT, dense_pieces, chart_breaks, hit)

        events = self._events(slack)
        t, y = 0.0, np.concatenate([p0, v0])
        values = [fn(p0) for _, fn, _ in events]
        solver = self._solver(t, y, t_max)
        steps = 0
        while True:
            if steps >= self.max_steps:
                return self._finish(samples, Termination.MAX_STEPS, dense_pieces, chart_breaks,
                                    message=f"max_steps = {self.max_steps} reached at t = {t:.6g}")
            message = solver.step()
            steps += 1
            if solver.status == "failed":
                x = solver.y[:dim]
                if float(np.linalg.norm(x)) > self.opts.blowup_norm:
                    return self._finish(samples, Termination.DOMAIN_EXIT, dense_pieces, chart_breaks,
                                        inextendible=True, message=f"coordinate blow-up: {message}")
                raise StiffnessError(f"Step size collapsed at t = {solver.t:.6g}, x = {x.tolist()}: {message}")

            t_new, y_new = float(solver.t), solver.y.copy()
            dense = solver.dense_output()
            hit: Optional[Tuple[float, str]] = None
            for (name, fn, threshold), f_a in zip(events, values):
                s = self._scan(fn, threshold, dense, t, t_new, f_a)
                if s is not None and (hit is None or s < hit[0]):
                    hit = (s, name)

            if hit is None:
                dense_pieces.append((t, t_new, dense))
                x_new, v_new = y_new[:dim], y_new[dim:]
                samples.append(TrajectorySample(t=t_new, x=x_new.tolist(), v=v_new.tolist()))
                if not self.model.derivatives_available(x_new, v_new):
                    return self._finish(samples, Termination.CONE_DOMAIN_EXIT, dense_pieces, chart_breaks)
                if solver.status == "finished":
                    return self._finish(samples, Termination.PARAMETER_END, dense_pieces, chart_breaks)
                t, y = t_new, y_new
                values = [fn(x_new) for _, fn, _ in events]
                continue

            s, name = hit
            y_hit = dense(s)
            x_hit, v_hit = y_hit[:dim], y_hit[dim:]
            dense_pieces.append((t, s, dense))
            if s > t:
                samples.append(TrajectorySample(t=s, x=x_hit.tolist(), v=v_hit.tolist()))
            if name == "boundary":
                return self._finish(samples, Termination.BOUNDARY_HIT, dense_pieces, chart_breaks,
                                    self._boundary_hit(s, x_hit, v_hit))
            if name == "domain":
                return self._finish(samples, Termination.DOMAIN_EXIT, dense_pieces, chart_breaks)

            x_map, v_map = self.model.transition.apply(x_hit, v_hit)
            logger.debug(f"{self.model.transition.name} at t = {s:.6g}: {x_hit.tolist()} -> {x_map.tolist()}")
            chart_breaks.append(len(samples))
            samples.append(TrajectorySample(t=s, x=list(map(float, x_map)), v=list(map(float, v_map))))
            t, y = s, np.concatenate([x_map, v_map])
            values = [fn(x_map) for _, fn, _ in events]
            solver = self._solver(t, y, t_max)


def integrate_geodesic(model: SpacetimeModel, p0, v0, t_max: float, opts: Optional[IntegrationOptions] = None,
                       tol: Optional[ToleranceConfig] = None) -> GeodesicSolution:
    return GeodesicIntegrator(model, tol, opts).integrate(p0, v0, t_max)


def integrate_both_ways(model: SpacetimeModel, p0, v0, t_max: float, opts: Optional[IntegrationOptions] = None,
                        tol: Optional[ToleranceConfig] = None) -> GeodesicSolution:
    """Future and past integration from (p0, v0) joined into one solution on (-T_past, T_future)."""
    integrator = GeodesicIntegrator(model, tol, opts)
    v0 = np.asarray(v0, dtype=float)
    future = integrator.integrate(p0, v0, t_max)
    past = integrator.integrate(p0, -v0, t_max)

    reversed_past = [TrajectorySample(t=-s.t, x=s.x, v=[-c for c in s.v]) for s in reversed(past.samples[1:])]
    offset = len(reversed_past)
    # a past break at index i separates samples i-1 and i; reversed, it sits before sample len-i
    past_breaks = [len(past.samples) - i for i in past.chart_breaks]
    chart_breaks = sorted(past_breaks + [offset + i for i in future.chart_breaks])

    def flip(interpolant):
        def evaluate(s: float) -> np.ndarray:
            y = np.array(interpolant(-s), dtype=float)
            y[model.dim:] *= -1.0
            return y
        return evaluate

    dense = [(-hi, -lo, flip(f)) for lo, hi, f in past.dense] + list(future.dense)
    samples = reversed_past + future.samples
    initial = future.lagrangian_initial
    drift = max(future.lagrangian_drift, past.lagrangian_drift)
    solution = future.model_copy(update={
        "samples": samples,
        "chart_breaks": chart_breaks,
        "lagrangian_drift": drift,
        "lagrangian_initial": initial,
        "past_termination": past.termination,
        "past_boundary_hit": past.boundary_hit,
        "inextendible": future.inextendible and past.inextendible,
    })
    solution.attach_dense(dense)
    return solution


def batch_integrate(model: SpacetimeModel, initial_data: Sequence[InitialData], t_max: float,
                    opts: Optional[IntegrationOptions] = None, jobs: int = 1,
                    tol: Optional[ToleranceConfig] = None) -> List[GeodesicSolution]:
    """Parallel shooting; results keep the order of the initial data."""
    def run(data: InitialData) -> GeodesicSolution:
        return integrate_geodesic(model, data.p, data.v, t_max, opts, tol)

    if jobs <= 1:
        return [run(data) for data in initial_data]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, initial_data))


def densified_points(solution: GeodesicSolution, per_step: int = 16) -> np.ndarray:
    """Points of the solution with per_step dense evaluations inside every accepted step."""
    if not solution.dense:
        return solution.points
    dim = len(solution.samples[0].x)
    chunks = []
    for lo, hi, interpolant in solution.dense:
        params = np.linspace(lo, hi, per_step + 1)
        chunks.append(np.array([interpolant(s)[:dim] for s in params]))
    return np.vstack(chunks)


# ---------------------------------------------------------------------------
# Lightlike lifts of Fermat geodesics
# ---------------------------------------------------------------------------
def require_stationary(model: SpacetimeModel) -> StationaryData:
    if model.stationary is None:
        raise NotStationaryError(f"Model {model.name} is not standard stationary")
    return model.stationary


def fermat_speeds(data: StationaryData, points: np.ndarray, velocities: np.ndarray) -> np.ndarray:
    with torch.no_grad():
        return np.array([float(data.fermat(to_tensor(x), to_tensor(v))) for x, v in zip(points, velocities)])


def geodesic_residual(data: StationaryData, points: np.ndarray) -> float:
    """Max over interior vertices of |d(discrete F-length)/d vertex| / local segment length."""
    points = np.asarray(points, dtype=float)
    if points.shape[0] < 3:
        return 0.0
    vertices = torch.tensor(points, dtype=torch.float64, requires_grad=True)
    (grad,) = torch.autograd.grad(data.polyline_length(vertices), vertices)
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    local = 0.5 * (steps[:-1] + steps[1:])
    interior = np.linalg.norm(grad.detach().numpy()[1:-1], axis=1)
    return float(np.max(interior / np.maximum(local, 1e-300)))


def lift_product_geodesic(model: SpacetimeModel, curve, t0: float = 0.0, start_param: float = 0.0,
                          residual_tol: float = 1e-3, resample: int = 400) -> GeodesicSolution:
    """Lift s -> (t0 + int F(sigma'), sigma(s)) of a Fermat geodesic sigma of the stationary model.

    ``curve`` is a GeodesicSolution of the Fermat model or a polyline of spatial points;
    polylines are parametrized by Fermat arc length starting at start_param.
    """
    data = require_stationary(model)
    if isinstance(curve, GeodesicSolution):
        params, points, velocities = curve.params, curve.points, curve.velocities
        checks = []
        for piece in split_pieces(np.arange(len(params)), curve.chart_breaks):
            a, b = params[piece[0]], params[piece[-1]]
            if curve.dense and b > a:
                inner = np.linspace(a, b, resample + 2)[1:-1]
                checks.append(curve.evaluate(inner)[:, :data.spatial_dim])
            else:
                checks.append(points[piece])
        termination = curve.termination
    else:
        points = np.asarray(curve, dtype=float)
        checks = [points]
        with torch.no_grad():
            lengths = [float(data.fermat(to_tensor(0.5 * (a + b)), to_tensor(b - a)))
                       for a, b in zip(points[:-1], points[1:])]
        params = start_param + np.concatenate([[0.0], np.cumsum(lengths)])
        velocities = np.gradient(points, params, axis=0)
        termination = Termination.PARAMETER_END

    residual = max(geodesic_residual(data, piece) for piece in checks)
    if residual > residual_tol:
        raise NotAGeodesicError(f"Curve fails the Fermat geodesic residual test: {residual:.3e} > {residual_tol:.1e}")

    speeds = fermat_speeds(data, points, velocities)
    times = t0 + np.concatenate([[0.0], cumulative_trapezoid(speeds, params)])
    samples = [
        TrajectorySample(t=float(s), x=[float(t), *map(float, x)], v=[float(f), *map(float, v)])
        for s, t, x, v, f in zip(params, times, points, velocities, speeds)
    ]
    values = [lagrangian_value(model.lagrangian, s.x, s.v) for s in samples]
    return GeodesicSolution(
        model_name=model.name,
        samples=samples,
        termination=termination,
        lagrangian_initial=values[0],
        lagrangian_drift=max(abs(v - values[0]) for v in values),
        chart_breaks=list(curve.chart_breaks) if isinstance(curve, GeodesicSolution) else [],
        message=f"lift of a Fermat geodesic (residual {residual:.2e})",
    )


# ---------------------------------------------------------------------------
# Conformal invariance of lightlike pregeodesics
# ---------------------------------------------------------------------------
def ads_to_conformal_chart(x: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(t, r, angles) -> (t, z(r), angles) with dz/dr = 1 / (r sqrt(1 + r^2))."""
    x, v = np.array(x, dtype=float), np.array(v, dtype=float)
    r = x[1]
    x[1] = z_of_r(r)
    v[1] = v[1] / (r * math.sqrt(1.0 + r * r))
    return x, v


def _truncate(points: np.ndarray, length: float) -> np.ndarray:
    arc = cumulative_arc_length(points)
    keep = arc <= length
    cut = int(np.sum(keep))
    if cut >= len(points):
        return points
    a, b = points[cut - 1], points[cut]
    fraction = (length - arc[cut - 1]) / max(arc[cut] - arc[cut - 1], 1e-300)
    return np.vstack([points[:cut], a + fraction * (b - a)])


def _parameter_at_length(solution: GeodesicSolution, points: np.ndarray, per_step: int, length: float) -> float:
    params = np.concatenate([np.linspace(lo, hi, per_step + 1) for lo, hi, _ in solution.dense]) \
        if solution.dense else solution.params
    arc = cumulative_arc_length(points)
    return float(np.interp(length, arc, params))


def conformal_compare(model: SpacetimeModel, u: Optional[Callable[[torch.Tensor, torch.Tensor], torch.Tensor]],
                      p0, v0, horizon: float, conformal: Optional[SpacetimeModel] = None,
                      chart_map: Optional[ChartMap] = None, opts: Optional[IntegrationOptions] = None,
                      tol: Optional[ToleranceConfig] = None, per_step: int = 16) -> ConformalDeviation:
    """Compare the lightlike geodesic of L with that of e^{2u} L from the same direction.

    ``conformal`` overrides the second model (e.g. conformal AdS, whose chart differs);
    ``chart_map`` carries points and vectors of the first model into its chart.
    """
    tol = resolve_tolerances(tol)
    p0, v0 = np.asarray(p0, dtype=float), np.asarray(v0, dtype=float)
    value = lagrangian_value(model.lagrangian, p0, v0)
    if abs(value) > tol.classification * float(v0 @ v0):
        raise NotLightlikeError(f"L(v0) = {value:.3e} is not zero")
    if conformal is None:
        if u is None:
            raise ValueError("conformal_compare needs u or an explicit conformal model")
        conformal = conformal_model(model, u)

    first = integrate_geodesic(model, p0, v0, horizon, opts, tol)
    q0, w0 = chart_map(p0, v0) if chart_map else (p0, v0)
    second = integrate_geodesic(conformal, q0, w0, horizon, opts, tol)

    image_first = densified_points(first, per_step)
    if chart_map:
        image_first = np.array([chart_map(x, np.zeros_like(x))[0] for x in image_first])
    image_second = densified_points(second, per_step)

    length = min(cumulative_arc_length(image_first)[-1], cumulative_arc_length(image_second)[-1])
    a, b = _truncate(image_first, length), _truncate(image_second, length)
    deviation = max(max_distance_to_polyline(a, b), max_distance_to_polyline(b, a))
    scale = max(1.0, float(np.max(np.abs(np.vstack([a, b])))))
    s_first = _parameter_at_length(first, image_first, per_step, length)
    s_second = _parameter_at_length(second, image_second, per_step, length)
    discrepancy = abs(s_first - s_second) / max(abs(s_first), abs(s_second), 1e-300)
    logger.info(f"conformal_compare {model.name} -> {conformal.name}: deviation {deviation:.2e} over length {length:.4g}")
    return ConformalDeviation(
        deviation=deviation,
        scale=scale,
        compared_length=length,
        parameter_discrepancy=discrepancy,
        certified=deviation <= 1e-6 * scale,
        first=first,
        second=second,
    )
