"""Certificates that one family of cone geodesics converges to two distinct limits.

Geodesics are compared in phase space: rows (x, v / Omega(v)) of stored samples,
joined into polylines that skip chart breaks. Distances are taken from window
samples of a limit to the polyline of a family member, which needs no
parameter alignment.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from finsler_cone.core.errors import ConfigError
from finsler_cone.models.base import SpacetimeModel
from finsler_cone.models.slit_plane import guide_curve
from finsler_cone.schemas.geodesics import GeodesicSolution, InitialData, IntegrationOptions
from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.schemas.lightspace import (
    CandidateSpec,
    DistanceEvidence,
    FamilySpec,
    NonHausdorffCertificate,
    ParameterWindow,
)
from finsler_cone.services.fermat import homotopy_class_minimizer
from finsler_cone.services.geodesic_flow import integrate_both_ways, integrate_geodesic, lift_product_geodesic
from finsler_cone.services.geometry_core import resolve_tolerances
from finsler_cone.utils.curves import max_distance_to_polyline, point_to_polyline_distances

logger = logging.getLogger(__name__)

Family = Union[FamilySpec, Sequence[GeodesicSolution]]

# lengths of the slit-plane guide curves increase to this bound
SLIT_PLANE_LIMIT_LENGTH = 4.0


def sample_gauges(model: SpacetimeModel, solution: GeodesicSolution) -> List[float]:
    return [model.omega(np.asarray(s.x), np.asarray(s.v)) for s in solution.samples]


def phase_rows(solution: GeodesicSolution, gauges: Sequence[float]) -> np.ndarray:
    return np.hstack([solution.points, solution.velocities / np.asarray(gauges, dtype=float)[:, None]])


def window_rows(model: SpacetimeModel, solution: GeodesicSolution, window: ParameterWindow) -> np.ndarray:
    try:
        states = solution.evaluate(np.linspace(window.lo, window.hi, window.samples))
    except ValueError as e:
        raise ConfigError(f"Comparison window [{window.lo}, {window.hi}] exceeds the integrated range: {e}") from e
    x, v = states[:, :model.dim], states[:, model.dim:]
    gauges = np.array([model.omega(a, b) for a, b in zip(x, v)])
    return np.hstack([x, v / gauges[:, None]])


def _member_distances(window_a: np.ndarray, window_b: np.ndarray, rows: np.ndarray,
                      breaks: Sequence[int]) -> Tuple[float, float]:
    return max_distance_to_polyline(window_a, rows, breaks), max_distance_to_polyline(window_b, rows, breaks)


def _decreasing(evidence: Sequence[DistanceEvidence], rtol: float) -> bool:
    """max(d_a, d_b) is non-increasing in family order, up to a relative slack."""
    maxima = [max(e.d_a, e.d_b) for e in evidence]
    # absolute floor for members that already coincide with the limits
    return all(later <= earlier * (1.0 + rtol) + 1e-12 for earlier, later in zip(maxima, maxima[1:]))


def _separation(window_a: np.ndarray, window_b: np.ndarray, rows_a: np.ndarray, breaks_a: Sequence[int],
                rows_b: np.ndarray, breaks_b: Sequence[int]) -> float:
    """Lower bound of the phase distance between the two limits over their windows."""
    return min(float(point_to_polyline_distances(window_a, rows_b, breaks_b).min()),
               float(point_to_polyline_distances(window_b, rows_a, breaks_a).min()))


def _integrate_family(model: SpacetimeModel, family: FamilySpec, horizon: float,
                      opts: Optional[IntegrationOptions], tol: ToleranceConfig, jobs: int) -> List[GeodesicSolution]:
    def run(data: InitialData) -> GeodesicSolution:
        if family.both_ways:
            return integrate_both_ways(model, data.p, data.v, horizon, opts, tol)
        return integrate_geodesic(model, data.p, data.v, horizon, opts, tol)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, family.members))
    return [run(data) for data in family.members]


def detect_nonhausdorff(model: SpacetimeModel, family: Family, candidates: Sequence[CandidateSpec],
                        horizon: float = 2.0, threshold: float = 1e-4, eps: Optional[Sequence[float]] = None,
                        decrease_rtol: float = 0.05,
                        opts: Optional[IntegrationOptions] = None, tol: Optional[ToleranceConfig] = None,
                        jobs: int = 1) -> Optional[NonHausdorffCertificate]:
    """Certificate that the family converges to both candidates, or None.

    ``family`` is a FamilySpec to integrate or a list of already computed
    solutions (e.g. lifts of homotopy-class minimizers) with parameters ``eps``.
    Members are ordered along the sequence: max(d_a, d_b) must decrease from
    one to the next (within ``decrease_rtol``) and end below ``threshold``.
    """
    tol = resolve_tolerances(tol)
    if len(candidates) != 2:
        raise ConfigError(f"Exactly two candidates are required, got {len(candidates)}")
    if isinstance(family, FamilySpec):
        if len(family.eps) != len(family.members):
            raise ConfigError("FamilySpec needs one eps per member")
        members = _integrate_family(model, family, horizon, opts, tol, jobs)
        eps = list(family.eps)
    else:
        members = list(family)
        eps = list(eps) if eps is not None else [1.0 / (k + 1) for k in range(len(members))]
    if not members:
        raise ConfigError("Empty family")

    limits = [integrate_both_ways(model, c.initial.p, c.initial.v, horizon, opts, tol) for c in candidates]
    window_a, window_b = (window_rows(model, s, c.window) for s, c in zip(limits, candidates))

    family_gauges = [sample_gauges(model, member) for member in members]
    evidence = []
    for k, (member, gauges, e) in enumerate(zip(members, family_gauges, eps)):
        d_a, d_b = _member_distances(window_a, window_b, phase_rows(member, gauges), member.chart_breaks)
        evidence.append(DistanceEvidence(index=k, eps=float(e), d_a=d_a, d_b=d_b))
        logger.debug(f"family member {k} (eps {e:g}): d_a {d_a:.3e}, d_b {d_b:.3e}")

    limit_gauges = [sample_gauges(model, s) for s in limits]
    rows_a, rows_b = (phase_rows(s, g) for s, g in zip(limits, limit_gauges))
    separation = _separation(window_a, window_b, rows_a, limits[0].chart_breaks, rows_b, limits[1].chart_breaks)
    final = max(evidence[-1].d_a, evidence[-1].d_b)

    if not _decreasing(evidence, decrease_rtol):
        logger.info(f"No certificate on {model.name}: family distances do not decrease "
                    f"{[round(max(e.d_a, e.d_b), 6) for e in evidence]}")
        return None
    if final >= threshold or separation <= 10.0 * threshold:
        logger.info(f"No certificate on {model.name}: final distance {final:.3e}, separation {separation:.3e} "
                    f"(threshold {threshold:g})")
        return None
    logger.info(f"Non-Hausdorff certificate on {model.name}: final distance {final:.3e}, separation {separation:.3e}")
    return NonHausdorffCertificate(
        model=model.name,
        threshold=threshold,
        family=members,
        limit_a=limits[0],
        limit_b=limits[1],
        window_a=window_a.tolist(),
        window_b=window_b.tolist(),
        evidence=evidence,
        decrease_rtol=decrease_rtol,
        separation=separation,
        family_gauges=family_gauges,
        limit_gauges=limit_gauges,
    )


def validate_certificate(cert: NonHausdorffCertificate, atol: float = 1e-10) -> bool:
    """Recompute every distance from the stored samples and re-check the certificate conditions."""
    window_a, window_b = np.asarray(cert.window_a), np.asarray(cert.window_b)
    if len(cert.family) != len(cert.evidence) or len(cert.family) != len(cert.family_gauges):
        return False
    for member, gauges, item in zip(cert.family, cert.family_gauges, cert.evidence):
        d_a, d_b = _member_distances(window_a, window_b, phase_rows(member, gauges), member.chart_breaks)
        if abs(d_a - item.d_a) > atol or abs(d_b - item.d_b) > atol:
            logger.warning(f"Evidence mismatch for member {item.index}: ({d_a}, {d_b}) vs ({item.d_a}, {item.d_b})")
            return False
    rows_a = phase_rows(cert.limit_a, cert.limit_gauges[0])
    rows_b = phase_rows(cert.limit_b, cert.limit_gauges[1])
    separation = _separation(window_a, window_b, rows_a, cert.limit_a.chart_breaks, rows_b, cert.limit_b.chart_breaks)
    if abs(separation - cert.separation) > atol:
        return False
    if not _decreasing(cert.evidence, cert.decrease_rtol):
        return False
    final = max(cert.evidence[-1].d_a, cert.evidence[-1].d_b)
    return final < cert.threshold and separation > 10.0 * cert.threshold


# ---------------------------------------------------------------------------
# Built-in constructions
# ---------------------------------------------------------------------------
def cone_surface_construction(ks: Sequence[float] = (10, 1e2, 1e3, 1e4, 1e5),
                              window: float = 0.3) -> Tuple[FamilySpec, List[CandidateSpec]]:
    """gamma_k(s) = (s, -1/k, s) against the lifts of the rays sigma_+ and sigma_- of the y axis."""
    family = FamilySpec(
        eps=[1.0 / k for k in ks],
        members=[InitialData(point=[0.0, -1.0 / k, 0.0], velocity=[1.0, 0.0, 1.0], label=f"gamma_{k:g}")
                 for k in ks],
    )
    candidates = [
        CandidateSpec(initial=InitialData(point=[0.5, 0.0, 0.5], velocity=[1.0, 0.0, 1.0], label="sigma_plus"),
                      window=ParameterWindow(lo=-window, hi=window)),
        CandidateSpec(initial=InitialData(point=[-0.5, 0.0, -0.5], velocity=[1.0, 0.0, 1.0], label="sigma_minus"),
                      window=ParameterWindow(lo=-window, hi=window)),
    ]
    return family, candidates


def slit_plane_construction(model: SpacetimeModel, ms: Optional[Sequence[int]] = None, vertices: int = 200,
                            budget: int = 3) -> Tuple[List[GeodesicSolution], List[float], List[CandidateSpec]]:
    """Lifts of the minimizers sigma_m from (0, -1) to (0, 1) in the class of the guide c_m.

    Returns (lifts, eps = 1/m, candidates): the lifts of sigma_- at height 0 and of
    sigma_+ arriving at height 4, each compared over x in [0.1, 0.7].
    """
    count = int(model.params.get("K", 0))
    ms = list(ms) if ms is not None else list(range(1, count))
    if not ms or max(ms) >= count or min(ms) < 1:
        raise ConfigError(f"slit indices must lie in [1, K-1] with K = {count}")
    z_minus, z_plus = np.array([0.0, -1.0]), np.array([0.0, 1.0])
    lifts = []
    for m in ms:
        minimizer = homotopy_class_minimizer(model, z_minus, z_plus, guide_curve(m), vertices, budget)
        lifts.append(lift_product_geodesic(model, minimizer.points, t0=0.0))
        logger.info(f"sigma_{m}: length {minimizer.length:.6f}")
    candidates = [
        CandidateSpec(initial=InitialData(point=[0.0, 0.0, -1.0], velocity=[1.0, 1.0, 0.0], label="sigma_minus"),
                      window=ParameterWindow(lo=0.1, hi=0.7)),
        CandidateSpec(initial=InitialData(point=[SLIT_PLANE_LIMIT_LENGTH - 0.9, 0.9, 1.0], velocity=[1.0, -1.0, 0.0],
                                          label="sigma_plus"),
                      window=ParameterWindow(lo=0.2, hi=0.8)),
    ]
    return lifts, [1.0 / m for m in ms], candidates
