import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from finsler_cone.core.errors import (
    ConfigError,
    FinslerConeError,
    NotInwardError,
    NotOnBoundaryError,
    NotTangentError,
)
from finsler_cone.models.base import SpacetimeModel
from finsler_cone.models.cone_triple import make_perturbed_half_space
from finsler_cone.schemas.boundary import (
    ConsistencyCase,
    ConsistencyReport,
    ConvexityEntry,
    ConvexityKind,
    ConvexityReport,
    ConvexitySummary,
    ProbeOutcome,
    ProbeResult,
    RiggingField,
    RiggingInvarianceResult,
    Verdict,
)
from finsler_cone.schemas.geodesics import IntegrationOptions
from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.services.connection import hessian
from finsler_cone.services.geodesic_flow import integrate_geodesic
from finsler_cone.services.geometry_core import resolve_tolerances, sample_boundary_tangents
from finsler_cone.utils.autodiff import scalar_value, scalar_value_and_gradient
from finsler_cone.utils.sampling import log_spaced_parameters

logger = logging.getLogger(__name__)

RiggingLike = Union[RiggingField, Sequence[float], np.ndarray, None]


def model_rigging(model: SpacetimeModel) -> RiggingField:
    return RiggingField(name=f"{model.name}.rigging", field=model.rigging_at)


def _rigging_vector(model: SpacetimeModel, eta: RiggingLike, p: np.ndarray) -> np.ndarray:
    if eta is None:
        return model.rigging_at(p)
    if isinstance(eta, RiggingField):
        return eta.at(p)
    return np.asarray(eta, dtype=float)


def _boundary_gradient(model: SpacetimeModel, p: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    if model.boundary is None:
        raise NotOnBoundaryError(f"Model {model.name} has no boundary")
    value, db = scalar_value_and_gradient(model.boundary, p)
    scale = max(1.0, float(np.linalg.norm(p))) * max(1.0, float(np.linalg.norm(db)))
    if abs(value) > tol.classification * scale:
        raise NotOnBoundaryError(f"b({p.tolist()}) = {value:.3e} is not zero")
    return db


def inwardness(model: SpacetimeModel, eta: RiggingLike, p) -> float:
    """db(eta(p)); positive for an inward transverse rigging."""
    p = np.asarray(p, dtype=float)
    _, db = scalar_value_and_gradient(model.boundary, p)
    return float(db @ _rigging_vector(model, eta, p))


def second_fundamental_form(model: SpacetimeModel, p, eta: RiggingLike, w, v_dir=None,
                            tol: Optional[ToleranceConfig] = None) -> float:
    """II^{v_dir}_eta(w, w) = -Hess^{v_dir} b (w, w) / db(eta) with respect to the region {b >= 0}."""
    tol = resolve_tolerances(tol)
    p, w = np.asarray(p, dtype=float), np.asarray(w, dtype=float)
    v_dir = w if v_dir is None else np.asarray(v_dir, dtype=float)
    db = _boundary_gradient(model, p, tol)
    if abs(float(db @ w)) > tol.classification * max(1.0, float(np.linalg.norm(w)) * float(np.linalg.norm(db))):
        raise NotTangentError(f"w = {w.tolist()} is not tangent to the boundary (db(w) = {float(db @ w):.3e})")
    rate = float(db @ _rigging_vector(model, eta, p))
    if not rate > 0.0:
        raise NotInwardError(f"Rigging is not inward at {p.tolist()}: db(eta) = {rate:.3e}")
    return -hessian(model, model.boundary, p, v_dir, w, w, tol) / rate


def rigging_invariance_check(model: SpacetimeModel, p, eta1: RiggingLike, eta2: RiggingLike, w, v_dir=None,
                             tol: Optional[ToleranceConfig] = None) -> RiggingInvarianceResult:
    tol = resolve_tolerances(tol)
    ii1 = second_fundamental_form(model, p, eta1, w, v_dir, tol)
    ii2 = second_fundamental_form(model, p, eta2, w, v_dir, tol)
    ratio = inwardness(model, eta1, p) / inwardness(model, eta2, p)
    band = tol.dead_band
    agree = (abs(ii1) <= band or abs(ii2) <= band) or math.copysign(1.0, ii1) == math.copysign(1.0, ii2)
    return RiggingInvarianceResult(ii1=ii1, ii2=ii2, ratio=ratio,
                                   relation_error=abs(ii2 - ratio * ii1), signs_agree=agree)


def verdict_for(ii: Optional[float], dead_band: float) -> Verdict:
    if ii is None or not math.isfinite(ii):
        return Verdict.INDETERMINATE
    return Verdict.STRICTLY_CONCAVE if ii < -dead_band else Verdict.CONVEX


def boundary_points(model: SpacetimeModel, grid: Union[int, Sequence[Sequence[float]]]) -> List[np.ndarray]:
    if isinstance(grid, int):
        if model.boundary_sampler is None:
            raise ConfigError(f"Model {model.name} has no boundary sampler; pass explicit points")
        return [np.asarray(p, dtype=float) for p in model.boundary_sampler(grid)]
    return [np.asarray(p, dtype=float) for p in grid]


def _entries_at(model: SpacetimeModel, index: int, p: np.ndarray, kind: ConvexityKind, dirs: int,
                eta: RiggingLike, tol: ToleranceConfig, seed: int) -> List[ConvexityEntry]:
    try:
        tangents = sample_boundary_tangents(model, p, kind, dirs, tol, seed)
    except FinslerConeError as e:
        logger.warning(f"No {kind} tangents at boundary point {index} of {model.name}: {e}")
        return [ConvexityEntry(point_index=index, direction_index=0, point=p.tolist(), direction=[],
                               verdict=Verdict.INDETERMINATE, error=f"{type(e).__name__}: {e}")]
    entries = []
    for j, w in enumerate(tangents):
        try:
            ii = second_fundamental_form(model, p, eta, w, w, tol)
            error = None
        except FinslerConeError as e:
            logger.error(f"II failed at point {index}, direction {j} of {model.name}", exc_info=True)
            ii, error = None, f"{type(e).__name__}: {e}"
        entries.append(ConvexityEntry(point_index=index, direction_index=j, point=p.tolist(),
                                      direction=w.tolist(), ii=ii, verdict=verdict_for(ii, tol.dead_band),
                                      error=error))
    return entries


def summarize(entries: List[ConvexityEntry], dead_band: float) -> ConvexitySummary:
    counts = {v.value: 0 for v in Verdict}
    for entry in entries:
        counts[entry.verdict.value] += 1
    values = [e.ii for e in entries if e.ii is not None and math.isfinite(e.ii)]
    if counts[Verdict.STRICTLY_CONCAVE.value]:
        verdict = Verdict.STRICTLY_CONCAVE
    elif entries and not values:
        verdict = Verdict.INDETERMINATE
    else:
        verdict = Verdict.CONVEX
    return ConvexitySummary(
        min_ii=min(values) if values else None,
        max_abs_ii=max(abs(v) for v in values) if values else None,
        counts=counts,
        verdict=verdict,
        totally_geodesic=bool(values) and max(abs(v) for v in values) <= dead_band,
    )


def classify_boundary_convexity(model: SpacetimeModel, kind: ConvexityKind = "light",
                                grid: Union[int, Sequence[Sequence[float]]] = 50, dirs: int = 32,
                                eta: RiggingLike = None, tol: Optional[ToleranceConfig] = None,
                                seed: int = 0, jobs: int = 1) -> ConvexityReport:
    """Sample II^w(w, w) over boundary points and tangent directions of the requested kind."""
    tol = resolve_tolerances(tol)
    points = boundary_points(model, grid)

    def at(item: Tuple[int, np.ndarray]) -> List[ConvexityEntry]:
        index, p = item
        return _entries_at(model, index, p, kind, dirs, eta, tol, seed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(at, enumerate(points)))
    else:
        batches = [at(item) for item in enumerate(points)]
    entries = [entry for batch in batches for entry in batch]
    summary = summarize(entries, tol.dead_band)
    logger.info(f"{model.name} {kind}-convexity: {summary.verdict.value} over {len(entries)} entries "
                f"(min II {summary.min_ii})")
    return ConvexityReport(model=model.name, kind=kind, dead_band=tol.dead_band, entries=entries, summary=summary)


def tangent_geodesic_probe(model: SpacetimeModel, p, w, horizon: float, tol: Optional[ToleranceConfig] = None,
                           count: int = 60) -> ProbeResult:
    """Classify the ambient geodesic from (p, w) by the first decisive sign of b along it."""
    tol = resolve_tolerances(tol)
    p, w = np.asarray(p, dtype=float), np.asarray(w, dtype=float)
    db = _boundary_gradient(model, p, tol)
    if abs(float(db @ w)) > tol.classification * max(1.0, float(np.linalg.norm(w)) * float(np.linalg.norm(db))):
        raise NotTangentError(f"w = {w.tolist()} is not tangent to the boundary")
    scale = max(1.0, float(np.linalg.norm(p)))
    threshold = 1e-8 * scale
    try:
        solution = integrate_geodesic(model, p, w, horizon, IntegrationOptions(boundary_events=False), tol)
        reached = float(solution.params[-1])
        params = [s for s in log_spaced_parameters(horizon, count) if s <= reached]
        states = solution.evaluate(params) if params else np.zeros((0, 2 * model.dim))
    except FinslerConeError as e:
        logger.warning(f"Probe integration failed at {p.tolist()}: {e}")
        return ProbeResult(outcome=ProbeOutcome.INDETERMINATE, horizon=horizon, message=f"{type(e).__name__}: {e}")

    max_abs = 0.0
    for s, state in zip(params, states):
        b = scalar_value(model.boundary, state[:model.dim])
        max_abs = max(max_abs, abs(b))
        if abs(b) > threshold:
            outcome = ProbeOutcome.EXITS_MANIFOLD if b < 0.0 else ProbeOutcome.ENTERS_INTERIOR
            return ProbeResult(outcome=outcome, horizon=horizon, decided_at=float(s), b_value=b, max_abs_b=max_abs)
    if not params:
        return ProbeResult(outcome=ProbeOutcome.INDETERMINATE, horizon=horizon, message="no samples on the horizon")
    return ProbeResult(outcome=ProbeOutcome.STAYS_ON_BOUNDARY, horizon=horizon, max_abs_b=max_abs,
                       message=None if reached >= horizon else f"integrated up to {reached:.6g}")


def expected_probe_outcome(ii: float, dead_band: float) -> ProbeOutcome:
    if ii > dead_band:
        return ProbeOutcome.EXITS_MANIFOLD
    if ii < -dead_band:
        return ProbeOutcome.ENTERS_INTERIOR
    return ProbeOutcome.STAYS_ON_BOUNDARY


def _consistency_case(seed: int, kind: str, horizon: float, min_ii: float, tol: ToleranceConfig) -> ConsistencyCase:
    try:
        model = make_perturbed_half_space(seed, kind)
        p = model.boundary_sampler(1)[0]
        tangents = sample_boundary_tangents(model, p, "light", 4, tol, seed)
        values = [second_fundamental_form(model, p, None, w, w, tol) for w in tangents]
        best = int(np.argmax(np.abs(values)))
        ii, w = values[best], tangents[best]
    except FinslerConeError as e:
        return ConsistencyCase(seed=seed, kind=kind, outcome=ProbeOutcome.INDETERMINATE, skipped=True,
                               error=f"{type(e).__name__}: {e}")
    if abs(ii) <= min_ii:
        return ConsistencyCase(seed=seed, kind=kind, ii=ii, outcome=ProbeOutcome.INDETERMINATE, skipped=True)
    result = tangent_geodesic_probe(model, p, w, horizon, tol)
    expected = expected_probe_outcome(ii, tol.dead_band)
    agrees = result.outcome == expected
    in_band = result.outcome == ProbeOutcome.INDETERMINATE or abs(ii) <= 10.0 * tol.dead_band
    return ConsistencyCase(seed=seed, kind=kind, ii=ii, outcome=result.outcome, expected=expected,
                           agrees=agrees, in_band=in_band)


def consistency_suite(seeds: Sequence[int] = range(200), kinds: Sequence[str] = ("quadratic", "randers"),
                      horizon: float = 0.2, min_ii: float = 1e-6, tol: Optional[ToleranceConfig] = None,
                      jobs: int = 1) -> ConsistencyReport:
    """II sign against tangent geodesic probes on randomized half-space models."""
    tol = resolve_tolerances(tol)
    jobs_list = [(seed, kinds[k % len(kinds)]) for k, seed in enumerate(seeds)]

    def run(item: Tuple[int, str]) -> ConsistencyCase:
        return _consistency_case(item[0], item[1], horizon, min_ii, tol)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cases = list(pool.map(run, jobs_list))
    else:
        cases = [run(item) for item in jobs_list]

    considered = [c for c in cases if not c.skipped]
    agreements = sum(1 for c in considered if c.agrees)
    outside = [c.seed for c in considered if not c.agrees and not c.in_band]
    rate = agreements / len(considered) if considered else 0.0
    logger.info(f"consistency suite: {agreements}/{len(considered)} agree, {len(outside)} outside the band")
    return ConsistencyReport(cases=cases, considered=len(considered), agreements=agreements,
                             agreement_rate=rate, disagreements_outside_band=outside)
