"""Fermat metric F = omega + sqrt(g_S + omega^2) of standard stationary models.

Lightlike geodesics of R x S project to pregeodesics of F, so connecting
F-geodesics inside S probe the causal behaviour of the spacetime. Connections
are searched by shooting (planar S) or by discrete length relaxation inside a
prescribed homotopy class.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch
from pydantic import BaseModel
from scipy.optimize import minimize, minimize_scalar

from finsler_cone.core.errors import BudgetExhaustedError, ConfigError, FinslerConeError
from finsler_cone.models.base import SpacetimeModel, StationaryData
from finsler_cone.schemas.boundary import ConvexityReport
from finsler_cone.schemas.geodesics import GeodesicSolution, IntegrationOptions
from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.schemas.lightspace import FermatProbeResult, HomotopyMinimizer, PairSpec
from finsler_cone.services.boundary_analysis import classify_boundary_convexity
from finsler_cone.services.geodesic_flow import integrate_geodesic, require_stationary
from finsler_cone.services.geometry_core import resolve_tolerances
from finsler_cone.utils.autodiff import scalar_value, to_numpy, to_tensor
from finsler_cone.utils.curves import arc_length_resample, segments_intersect

logger = logging.getLogger(__name__)

Segment = Tuple[np.ndarray, np.ndarray]


class FermatMetric(BaseModel):
    data: StationaryData

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    def __call__(self, x, v) -> float:
        with torch.no_grad():
            return float(self.data.fermat(to_tensor(x), to_tensor(v)))

    def reversibility_gap(self, x, v) -> float:
        """|F(v) - F(-v)|; zero for static models."""
        v = np.asarray(v, dtype=float)
        return abs(self(x, v) - self(x, -v))


def fermat_metric(model: SpacetimeModel) -> FermatMetric:
    return FermatMetric(data=require_stationary(model))


def fermat_model(model: SpacetimeModel) -> SpacetimeModel:
    """The Finsler manifold (S, F) as a positive definite model with L = F^2."""
    data = require_stationary(model)

    def lagrangian(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
        value = data.fermat(x, v)
        return value * value

    return SpacetimeModel(
        name=f"{model.name}_fermat",
        dim=data.spatial_dim,
        params=model.params,
        lower=list(data.lower),
        upper=list(data.upper),
        lagrangian=lagrangian,
        boundary=data.boundary,
        rigging=data.rigging,
        domain_fns=list(data.domain_fns),
        transition=data.transition,
        boundary_sampler=data.boundary_sampler,
        max_step=model.max_step,
        positive_definite=True,
    )


def fermat_geodesic(model: SpacetimeModel, x0, v0, t_max: float, opts: Optional[IntegrationOptions] = None,
                    tol: Optional[ToleranceConfig] = None) -> GeodesicSolution:
    """Unit-speed F-geodesic of a stationary model; the parameter is Fermat length."""
    metric = fermat_metric(model)
    v0 = np.asarray(v0, dtype=float)
    return integrate_geodesic(fermat_model(model), x0, v0 / metric(x0, v0), t_max, opts, tol)


def fermat_boundary_convexity(model: SpacetimeModel, grid=32, dirs: int = 8, tol: Optional[ToleranceConfig] = None,
                              seed: int = 0, jobs: int = 1) -> ConvexityReport:
    """Convexity of dS for F; for product models it matches light convexity of R x dS."""
    return classify_boundary_convexity(fermat_model(model), "space", grid, dirs, None, tol, seed, jobs)


# ---------------------------------------------------------------------------
# Homotopy-class minimizers
# ---------------------------------------------------------------------------
def obstacles(model: SpacetimeModel) -> List[Segment]:
    """Slit segments declared by the model parameters."""
    return [(np.array([x, lo]), np.array([x, hi])) for x, lo, hi in model.params.get("slits", [])]


def _relax(data: StationaryData, start: np.ndarray, gtol: float) -> Tuple[np.ndarray, float, int, bool]:
    z1, z2 = to_tensor(start[0])[None], to_tensor(start[-1])[None]
    n = start.shape[1]

    def objective(flat: np.ndarray) -> Tuple[float, np.ndarray]:
        inner = to_tensor(flat.reshape(-1, n)).requires_grad_()
        length = data.polyline_length(torch.cat([z1, inner, z2]))
        (grad,) = torch.autograd.grad(length, inner)
        return float(length), to_numpy(grad).ravel()

    res = minimize(objective, start[1:-1].ravel(), jac=True, method="L-BFGS-B",
                   options={"maxiter": 20000, "maxfun": 50000, "gtol": gtol, "ftol": 1e-15})
    points = np.vstack([start[0], res.x.reshape(-1, n), start[-1]])
    return points, float(res.fun), int(res.nit), bool(res.success)


def _class_violation(model: SpacetimeModel, points: np.ndarray, walls: Sequence[Segment]) -> Optional[str]:
    for a, b in zip(points[:-1], points[1:]):
        for w1, w2 in walls:
            if segments_intersect(a, b, w1, w2):
                return f"segment {a.tolist()} -> {b.tolist()} crosses a slit"
    for x in points[1:-1]:
        if not model.in_domain(x):
            return f"vertex {x.tolist()} leaves the domain"
        if model.boundary is not None and scalar_value(model.boundary, x) < 0.0:
            return f"vertex {x.tolist()} leaves the region b >= 0"
        if model.transition is not None and model.transition.event(x) < 0.0:
            return f"vertex {x.tolist()} lies beyond the chart cut"
    return None


def homotopy_class_minimizer(model: SpacetimeModel, z1, z2, guide, vertices: int = 200, budget: int = 3,
                             gtol: float = 1e-10) -> HomotopyMinimizer:
    """Shortest polyline from z1 to z2 homotopic to the guide, by L-BFGS relaxation of the Fermat length.

    A relaxed polyline that jumps over a slit or leaves S is discarded and the
    relaxation restarts with twice the vertices; after ``budget`` rounds
    BudgetExhaustedError is raised.
    """
    data = require_stationary(model)
    fmodel = fermat_model(model)
    z1, z2 = np.asarray(z1, dtype=float), np.asarray(z2, dtype=float)
    guide = np.asarray(guide, dtype=float)
    if not (np.allclose(guide[0], z1) and np.allclose(guide[-1], z2)):
        raise ConfigError("The guide polyline must run from z1 to z2")
    walls = obstacles(model)

    count = max(vertices, 3)
    for round_ in range(budget):
        start = arc_length_resample(guide, count)
        start[0], start[-1] = z1, z2
        points, length, iterations, converged = _relax(data, start, gtol)
        problem = _class_violation(fmodel, points, walls)
        if problem is None:
            logger.debug(f"homotopy minimizer: length {length:.10g} with {count} vertices ({iterations} iterations)")
            return HomotopyMinimizer(points=points.tolist(), length=length, vertices=count,
                                     iterations=iterations, converged=converged)
        logger.warning(f"Relaxation round {round_ + 1} left the homotopy class: {problem}")
        count *= 2
    raise BudgetExhaustedError(f"No admissible minimizer after {budget} refinement rounds")


# ---------------------------------------------------------------------------
# Connecting geodesics by shooting
# ---------------------------------------------------------------------------
class _Shooter:
    """Closest approach to z2 of unit-speed F-geodesics leaving z1."""

    def __init__(self, model: SpacetimeModel, z1: np.ndarray, z2: np.ndarray, horizon: float,
                 opts: Optional[IntegrationOptions], tol: ToleranceConfig):
        self.fmodel = fermat_model(model)
        self.metric = fermat_metric(model)
        self.z1, self.z2 = z1, z2
        self.horizon = horizon
        self.opts = opts
        self.tol = tol

    def direction(self, angle: float) -> np.ndarray:
        if self.fmodel.dim == 1:
            return np.array([1.0 if math.cos(angle) >= 0.0 else -1.0])
        return np.array([math.cos(angle), math.sin(angle)])

    def solve(self, angle: float) -> GeodesicSolution:
        v0 = self.direction(angle)
        return integrate_geodesic(self.fmodel, self.z1, v0 / self.metric(self.z1, v0), self.horizon,
                                  self.opts, self.tol)

    def closest(self, angle: float) -> Tuple[float, float]:
        """(distance to z2, parameter) at the closest approach."""
        solution = self.solve(angle)
        dim = self.fmodel.dim
        best = (float(np.linalg.norm(self.z1 - self.z2)), 0.0, None)
        for lo, hi, interpolant in solution.dense:
            params = np.linspace(lo, hi, 9)
            gaps = [float(np.linalg.norm(interpolant(s)[:dim] - self.z2)) for s in params]
            j = int(np.argmin(gaps))
            if gaps[j] < best[0]:
                best = (gaps[j], float(params[j]), (lo, hi, interpolant))
        distance, s, piece = best
        if piece is None:
            return distance, s
        lo, hi, interpolant = piece
        width = (hi - lo) / 8.0
        res = minimize_scalar(lambda r: float(np.linalg.norm(interpolant(r)[:dim] - self.z2)),
                              bounds=(max(lo, s - width), min(hi, s + width)), method="bounded",
                              options={"xatol": 1e-14 * max(1.0, hi)})
        if res.fun < distance:
            return float(res.fun), float(res.x)
        return distance, s

    def path(self, angle: float, length: float) -> List[List[float]]:
        solution = self.solve(angle)
        keep = [s.x for s in solution.samples if s.t < length]
        return keep + [self.z2.tolist()]


def _scan_fan(shooter: _Shooter, count: int, hit_tol: float) -> List[Tuple[float, float]]:
    if shooter.fmodel.dim == 1:
        angles = np.array([0.0, math.pi])
    else:
        angles = 2.0 * math.pi * np.arange(count) / count
    values = [shooter.closest(a)[0] for a in angles]
    step = 2.0 * math.pi / len(angles)
    hits: List[Tuple[float, float]] = []
    for j, angle in enumerate(angles):
        if shooter.fmodel.dim == 1:
            candidate = float(angle)
        else:
            if values[j] > values[j - 1] or values[j] > values[(j + 1) % len(values)]:
                continue
            res = minimize_scalar(lambda a: shooter.closest(a)[0], bounds=(angle - step, angle + step),
                                  method="bounded", options={"xatol": 1e-13})
            candidate = float(res.x)
        distance, length = shooter.closest(candidate)
        if distance > hit_tol:
            continue
        if any(abs(math.remainder(candidate - a, 2.0 * math.pi)) < 1e-6 for a, _ in hits):
            continue
        hits.append((candidate, length))
    return hits


def _segment_inside(model: SpacetimeModel, z1: np.ndarray, z2: np.ndarray, walls: Sequence[Segment]) -> bool:
    points = z1 + np.linspace(0.0, 1.0, 65)[:, None] * (z2 - z1)
    return _class_violation(model, points, walls) is None and model.in_domain(z1) and model.in_domain(z2)


def _probe_shooting(model: SpacetimeModel, pair: PairSpec, fan: int, budget: int, horizon: Optional[float],
                    vertices: int, gap_tol: float, hit_tol: float, opts: Optional[IntegrationOptions],
                    tol: ToleranceConfig) -> FermatProbeResult:
    z1, z2 = np.asarray(pair.z1, dtype=float), np.asarray(pair.z2, dtype=float)
    if z1.shape[0] > 2:
        raise ConfigError("Shooting probes need a planar S; pass a guide polyline instead")
    scale = max(1.0, float(np.max(np.abs(np.concatenate([z1, z2])))))
    horizon = horizon or 3.0 * float(np.linalg.norm(z2 - z1)) + 1.0
    shooter = _Shooter(model, z1, z2, horizon, opts, tol)

    hits: List[Tuple[float, float]] = []
    count = fan
    for _ in range(budget):
        hits = _scan_fan(shooter, count, hit_tol * scale)
        if hits:
            break
        count *= 2
    if not hits:
        raise BudgetExhaustedError(f"No connecting geodesic found with fans up to {count // 2} directions")

    hits.sort(key=lambda hit: hit[1])
    best_angle, best = hits[0]
    infimum, allowance = best, gap_tol * scale
    walls = obstacles(model)
    if _segment_inside(shooter.fmodel, z1, z2, walls):
        chord = np.vstack([z1, z2])
        relaxed = homotopy_class_minimizer(model, z1, z2, chord, vertices, budget)
        refined = homotopy_class_minimizer(model, z1, z2, relaxed.points, 2 * relaxed.vertices, budget)
        infimum = min(infimum, refined.length)
        allowance += abs(relaxed.length - refined.length)

    lengths = [length for _, length in hits]
    cut_point = len(lengths) >= 2 and lengths[1] - lengths[0] <= 1e-6
    found = best <= infimum + allowance
    return FermatProbeResult(
        label=pair.label, z1=pair.z1, z2=pair.z2,
        minimizer_found=found,
        status="found" if found else "not_found",
        best_length=best,
        infimum_estimate=infimum,
        gap=best - infimum,
        connecting_lengths=lengths,
        cut_point=cut_point,
        best_geodesic=shooter.path(best_angle, best),
    )


def _probe_guided(model: SpacetimeModel, pair: PairSpec, vertices: int, budget: int,
                  class_gap: float) -> FermatProbeResult:
    coarse = homotopy_class_minimizer(model, pair.z1, pair.z2, pair.guide, vertices, budget)
    fine = homotopy_class_minimizer(model, pair.z1, pair.z2, coarse.points, 2 * coarse.vertices, budget)
    gap = abs(coarse.length - fine.length)
    found = gap <= class_gap * fine.length
    return FermatProbeResult(
        label=pair.label, z1=pair.z1, z2=pair.z2,
        minimizer_found=found,
        status="found" if found else "not_found",
        best_length=fine.length,
        infimum_estimate=min(coarse.length, fine.length),
        gap=gap,
        connecting_lengths=[fine.length],
        best_geodesic=fine.points,
    )


def convexity_probe_S(model: SpacetimeModel, pairs: Sequence[PairSpec], budget: int = 3, fan: int = 64,
                      horizon: Optional[float] = None, vertices: int = 200, gap_tol: float = 1e-6,
                      hit_tol: float = 1e-7, class_gap: float = 1e-3, opts: Optional[IntegrationOptions] = None,
                      tol: Optional[ToleranceConfig] = None, jobs: int = 1) -> List[FermatProbeResult]:
    """Per pair: does a connecting F-geodesic attain the sampled length infimum inside S?

    Pairs with a guide are relaxed inside the guide's homotopy class; the others
    are shot from z1 over a fan of directions and compared with the relaxed chord
    when the chord lies in S. Exhausted budgets come back as indeterminate.
    """
    tol = resolve_tolerances(tol)
    require_stationary(model)

    def run(pair: PairSpec) -> FermatProbeResult:
        try:
            if pair.guide is not None:
                return _probe_guided(model, pair, vertices, budget, class_gap)
            return _probe_shooting(model, pair, fan, budget, horizon, vertices, gap_tol, hit_tol, opts, tol)
        except BudgetExhaustedError as e:
            logger.warning(f"Fermat probe {pair.label or pair.z1}: {e}")
            return FermatProbeResult(label=pair.label, z1=pair.z1, z2=pair.z2, status="indeterminate",
                                     message=str(e))
        except FinslerConeError as e:
            logger.error(f"Fermat probe {pair.label or pair.z1} failed", exc_info=True)
            return FermatProbeResult(label=pair.label, z1=pair.z1, z2=pair.z2, status="indeterminate",
                                     message=f"{type(e).__name__}: {e}")

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, pairs))
    else:
        results = [run(pair) for pair in pairs]
    logger.info(f"Fermat probes on {model.name}: "
                f"{sum(1 for r in results if r.minimizer_found)}/{len(results)} pairs connected by minimizers")
    return results
