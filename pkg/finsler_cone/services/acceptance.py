"""Fixed manifest of closed-form and property checks run by ``verify-paper``.

Every check returns criteria (value, tolerance); a check passes when each value
stays at or below its tolerance. ``tolerance_override`` replaces every tolerance
of the run, which turns the suite into a forced-failure probe.
"""
import logging
import math
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch
from pydantic import BaseModel, Field
from scipy.optimize import brentq

from finsler_cone.core.errors import FinslerConeError
from finsler_cone.models.ads import make_ads, make_ads_conformal, make_asympt_ads, z_star
from finsler_cone.models.base import SpacetimeModel, conformal_model
from finsler_cone.models.catalog import CATALOG, build_model
from finsler_cone.models.cone_triple import make_cone_triple, make_perturbed_half_space
from finsler_cone.models.products import make_cylinder_strip, make_minkowski, make_stationary
from finsler_cone.models.slit_plane import make_product_slit_plane
from finsler_cone.schemas.boundary import Verdict
from finsler_cone.schemas.geodesics import GeodesicSolution, InitialData
from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.schemas.lightspace import CandidateSpec, CauchySurface, ChartKind, FamilySpec, ParameterWindow
from finsler_cone.schemas.run import CheckResult, Criterion, VerificationReport
from finsler_cone.services.boundary_analysis import (
    classify_boundary_convexity,
    consistency_suite,
    model_rigging,
    rigging_invariance_check,
    second_fundamental_form,
)
from finsler_cone.services.connection import christoffel_array
from finsler_cone.services.fermat import fermat_boundary_convexity, fermat_metric
from finsler_cone.services.geodesic_flow import (
    ads_to_conformal_chart,
    batch_integrate,
    conformal_compare,
    integrate_both_ways,
)
from finsler_cone.services.geometry_core import (
    boundary_frame,
    cone_direction_solve,
    fundamental_tensor,
    resolve_tolerances,
    sample_boundary_tangents,
)
from finsler_cone.services.lightspace import (
    cone_surface_construction,
    detect_nonhausdorff,
    glue_charts,
    sample_chart_boundary,
    sample_chart_interior,
    slit_plane_construction,
    validate_certificate,
)
from finsler_cone.utils.autodiff import fundamental_matrix_with_derivative, lagrangian_value
from finsler_cone.utils.finite_differences import fd_christoffel, fd_fundamental_matrix, relative_gap

logger = logging.getLogger(__name__)

# slits in the slit-plane run; the last minimizer then lies within 0.25 of sigma_+
SLIT_PLANE_K = 10


class CheckContext(BaseModel):
    seed: int = 0
    jobs: int = 1
    tol: ToleranceConfig

    class Config:
        frozen = True


class Measurement(BaseModel):
    criteria: List[Tuple[str, float, float]]
    details: Dict[str, Any] = Field(default_factory=dict)


CheckFunction = Callable[[CheckContext], Measurement]


class AcceptanceCheck(BaseModel):
    name: str
    tags: List[str]
    description: str
    run: CheckFunction

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    def selected(self, only: Optional[Sequence[str]]) -> bool:
        return not only or any(token == self.name or token in self.tags for token in only)


CHECKS: List[AcceptanceCheck] = []


def check(name: str, tags: Sequence[str], description: str):
    def register(fn: CheckFunction) -> CheckFunction:
        CHECKS.append(AcceptanceCheck(name=name, tags=list(tags), description=description, run=fn))
        return fn
    return register


def _flag(condition: bool) -> float:
    """0 when the condition holds, 1 otherwise; used as a count criterion with tolerance 0."""
    return 0.0 if condition else 1.0


def _parameter_at(solution: GeodesicSolution, component: int, level: float) -> float:
    values = solution.points[:, component]
    k = int(np.argmax(values >= level))
    if values[k] < level or k == 0:
        raise FinslerConeError(f"Solution never crosses x^{component} = {level}")
    lo, hi = float(solution.params[k - 1]), float(solution.params[k])
    return brentq(lambda s: float(solution.evaluate(s)[0, component]) - level, lo, hi, xtol=1e-14)


# ---------------------------------------------------------------------------
# Anti-de Sitter family
# ---------------------------------------------------------------------------
@check("ads_second_fundamental_form", ["ads", "boundary"],
       "II of H_r along X+- equals sqrt(1 + r^2) / r")
def ads_second_fundamental_form(ctx: CheckContext) -> Measurement:
    worst, values = 0.0, {}
    for r in (0.5, 1.0, 2.0, 10.0):
        model = make_ads(n=2, region="inner", r0=r)
        expected = math.sqrt(1.0 + r * r) / r
        for sign in (1.0, -1.0):
            w = np.array([1.0, 0.0, sign * expected])
            ii = second_fundamental_form(model, [0.0, r, 0.3], None, w, w, ctx.tol)
            worst = max(worst, abs(ii - expected) / expected)
            values[f"r={r:g},sign={sign:+g}"] = ii
    return Measurement(criteria=[("relative_error", worst, 1e-6)], details={"ii": values})


@check("ads_conformal_extension", ["ads", "models"],
       "f(z_*) = 1, f'(z_*) = 0, f''(z_*) = 2 from one-sided differences")
def ads_conformal_extension(ctx: CheckContext) -> Measurement:
    model = make_ads_conformal()
    zs = z_star()
    h = 1e-3
    f = [lagrangian_value(model.lagrangian, [0.0, zs - k * h, 0.3], [1.0, 0.0, 0.0]) for k in range(4)]
    first = (3.0 * f[0] - 4.0 * f[1] + f[2]) / (2.0 * h)
    second = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h)
    return Measurement(
        criteria=[("f_minus_one", abs(f[0] - 1.0), 1e-10), ("df", abs(first), 1e-6),
                  ("d2f_minus_two", abs(second - 2.0), 1e-4)],
        details={"z_star": zs, "closed_form_gap": abs(zs - math.asinh(0.5)), "f": f[0], "df": first, "d2f": second},
    )


@check("ads_conformal_totally_geodesic", ["ads", "boundary"],
       "II vanishes on 32 lightlike tangents of the conformal boundary")
def ads_conformal_totally_geodesic(ctx: CheckContext) -> Measurement:
    report = classify_boundary_convexity(make_ads_conformal(), "light", grid=16, dirs=2, tol=ctx.tol,
                                         seed=ctx.seed, jobs=ctx.jobs)
    max_abs = report.summary.max_abs_ii if report.summary.max_abs_ii is not None else math.inf
    return Measurement(
        criteria=[("max_abs_ii", max_abs, 1e-6), ("missing_tangents", float(abs(32 - len(report.entries))), 0.0)],
        details={"entries": len(report.entries), "verdict": report.summary.verdict.value},
    )


@check("ads_null_escape", ["ads", "flow"],
       "radial null geodesic: Delta t(2 -> 10) = arctan 10 - arctan 2, total below pi / 2")
def ads_null_escape(ctx: CheckContext) -> Measurement:
    model = make_ads(n=2, region="full")
    solution = integrate_both_ways(model, [0.0, 2.0, 0.3], [1.0, 5.0, 0.0], 3e5, tol=ctx.tol)
    s2, s10 = _parameter_at(solution, 1, 2.0), _parameter_at(solution, 1, 10.0)
    times = solution.evaluate([s2, s10])[:, 0]
    delta = float(times[1] - times[0])
    total = float(solution.points[-1, 0] - solution.points[0, 0])
    expected = math.atan(10.0) - math.atan(2.0)
    return Measurement(
        criteria=[("delta_t_error", abs(delta - expected), 1e-6), ("escape_excess", total - math.pi / 2.0, 1e-4),
                  ("lagrangian_drift", solution.lagrangian_drift, 1e-8)],
        details={"delta_t": delta, "expected": expected, "total_delta_t": total,
                 "termination": solution.termination.value},
    )


@check("ads_conformal_invariance", ["ads", "flow"],
       "AdS and conformal AdS radial null images coincide after z(r)")
def ads_conformal_invariance(ctx: CheckContext) -> Measurement:
    result = conformal_compare(make_ads(n=2, region="full"), None, [0.0, 3.0, 0.3], [1.0, 10.0, 0.0], 10.0,
                               conformal=make_ads_conformal(), chart_map=ads_to_conformal_chart, tol=ctx.tol)
    return Measurement(criteria=[("relative_deviation", result.deviation / result.scale, 1e-6)],
                       details={"deviation": result.deviation, "compared_length": result.compared_length})


@check("asympt_ads_boundary_metric", ["ads", "models"],
       "extended metric and first derivatives of asymptotically AdS match AdS at z_*")
def asympt_ads_boundary_metric(ctx: CheckContext) -> Measurement:
    point, vector = [0.0, z_star(), 0.4], [1.0, 0.2, 0.3]
    g0, dg0 = fundamental_matrix_with_derivative(make_ads_conformal().lagrangian, point, vector)
    g1, dg1 = fundamental_matrix_with_derivative(make_asympt_ads().lagrangian, point, vector)
    return Measurement(criteria=[("metric_gap", float(np.max(np.abs(g0 - g1))), 1e-5),
                                 ("derivative_gap", float(np.max(np.abs(dg0 - dg1))), 1e-5)])


@check("asympt_ads_lightconvexity", ["ads", "boundary"],
       "asymptotically AdS boundary is lightconvex and totally geodesic")
def asympt_ads_lightconvexity(ctx: CheckContext) -> Measurement:
    summary = classify_boundary_convexity(make_asympt_ads(), "light", grid=16, dirs=2, tol=ctx.tol,
                                          seed=ctx.seed, jobs=ctx.jobs).summary
    max_abs = summary.max_abs_ii if summary.max_abs_ii is not None else math.inf
    return Measurement(
        criteria=[("verdict_mismatch", _flag(summary.verdict == Verdict.CONVEX and summary.totally_geodesic), 0.0),
                  ("max_abs_ii", max_abs, 1e-6)],
        details={"verdict": summary.verdict.value},
    )


# ---------------------------------------------------------------------------
# Boundary convexity properties
# ---------------------------------------------------------------------------
@check("probe_consistency", ["boundary", "slow"],
       "II sign against tangent geodesic probes on 200 random half-space models")
def probe_consistency(ctx: CheckContext) -> Measurement:
    report = consistency_suite(seeds=range(ctx.seed, ctx.seed + 200), tol=ctx.tol, jobs=ctx.jobs)
    return Measurement(
        criteria=[("disagreement_rate", 1.0 - report.agreement_rate, 0.01),
                  ("outside_band", float(len(report.disagreements_outside_band)), 0.0)],
        details={"considered": report.considered, "agreements": report.agreements},
    )


@check("rigging_invariance", ["boundary"],
       "II signs agree for independent inward riggings and II2 = B II1 on 500 samples")
def rigging_invariance(ctx: CheckContext) -> Measurement:
    rng = np.random.default_rng(ctx.seed)
    disagreements, worst, samples = 0, 0.0, 0
    for k in range(25):
        model = make_perturbed_half_space(ctx.seed + k, "quadratic" if k % 2 == 0 else "randers")
        base = model_rigging(model)
        for p in model.boundary_sampler(10):
            _, kernel = boundary_frame(model, p, ctx.tol)
            shift = kernel @ rng.normal(0.0, 1.0, kernel.shape[1])
            other = base.scaled(float(rng.uniform(0.2, 5.0))).shifted(lambda x, s=shift: s)
            for w in sample_boundary_tangents(model, p, "light", 2, ctx.tol, ctx.seed):
                result = rigging_invariance_check(model, p, base, other, w, w, ctx.tol)
                samples += 1
                disagreements += 0 if result.signs_agree else 1
                worst = max(worst, result.relation_error / max(1.0, abs(result.ii2)))
    return Measurement(criteria=[("sign_disagreements", float(disagreements), 0.0), ("relation_error", worst, 1e-8)],
                       details={"samples": samples})


def _random_conformal_factor(rng: np.random.Generator, dim: int):
    amplitude, frequency, phase = rng.uniform(-0.5, 0.5, dim), rng.uniform(0.2, 2.0, dim), rng.uniform(0, math.pi, dim)
    a, b, c = (torch.as_tensor(values) for values in (amplitude, frequency, phase))

    def u(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
        return torch.sum(a.to(x) * torch.sin(b.to(x) * x + c.to(x)))

    return u


@check("conformal_verdict_invariance", ["boundary"],
       "lightconvexity verdicts survive five random conformal factors")
def conformal_verdict_invariance(ctx: CheckContext) -> Measurement:
    rng = np.random.default_rng(ctx.seed)
    verdict_changes, sign_changes, verdicts = 0, 0, {}
    for label, model in (("disk", make_stationary(domain="disk")), ("cassini", make_stationary(domain="cassini"))):
        base = classify_boundary_convexity(model, "light", grid=12, dirs=2, tol=ctx.tol, seed=ctx.seed)
        verdicts[label] = base.summary.verdict.value
        for _ in range(5):
            scaled = conformal_model(model, _random_conformal_factor(rng, model.dim))
            report = classify_boundary_convexity(scaled, "light", grid=12, dirs=2, tol=ctx.tol, seed=ctx.seed)
            verdict_changes += 0 if report.summary.verdict == base.summary.verdict else 1
            for before, after in zip(base.entries, report.entries):
                if before.ii is None or after.ii is None or abs(before.ii) <= ctx.tol.dead_band:
                    continue
                sign_changes += 0 if math.copysign(1.0, before.ii) == math.copysign(1.0, after.ii) else 1
    return Measurement(criteria=[("verdict_changes", float(verdict_changes), 0.0),
                                 ("sign_changes", float(sign_changes), 0.0)],
                       details={"verdicts": verdicts})


# ---------------------------------------------------------------------------
# Integration and differentiation oracles
# ---------------------------------------------------------------------------
def _drift_cases(seed: int) -> List[Tuple[SpacetimeModel, List[InitialData], float]]:
    half_space = make_perturbed_half_space(seed, "quadratic")
    return [
        (make_minkowski(), [InitialData(point=[0.0, 0.0], velocity=[1.0, 0.5])], 5.0),
        (make_ads(n=2, region="full"), [InitialData(point=[0.0, 2.0, 0.3], velocity=[1.0, 5.0, 0.0]),
                                        InitialData(point=[0.0, 1.0, 0.3], velocity=[1.0, 0.5, 0.2])], 3.0),
        (make_ads_conformal(), [InitialData(point=[0.0, 0.1, 0.3], velocity=[1.0, 0.3, 0.4])], 2.0),
        (make_stationary(domain="plane", omega_kind="rotation", omega_value=0.3),
         [InitialData(point=[0.0, 0.2, 0.1], velocity=[1.5, 0.4, 0.3])], 3.0),
        (make_cone_triple(norm="randers"), [InitialData(point=[0.0, 0.0, 0.0], velocity=[2.0, 1.0, 0.5])], 3.0),
        (half_space, [InitialData(point=[0.0, 1.0, 0.0], velocity=[1.0, 0.1, 0.2])], 1.0),
    ]


@check("lagrangian_drift", ["flow"], "L is conserved along integrated geodesics")
def lagrangian_drift(ctx: CheckContext) -> Measurement:
    worst, drifts = 0.0, {}
    for model, data, horizon in _drift_cases(ctx.seed):
        for k, solution in enumerate(batch_integrate(model, data, horizon, jobs=ctx.jobs, tol=ctx.tol)):
            relative = solution.lagrangian_drift / (1.0 + abs(solution.lagrangian_initial))
            drifts[f"{model.name}[{k}]"] = relative
            worst = max(worst, relative)
    return Measurement(criteria=[("relative_drift", worst, 1e-8)], details={"drifts": drifts})


# point and cone-interior vector per catalog model
ORACLE_SAMPLES: Dict[str, Tuple[List[float], List[float]]] = {
    "minkowski": ([0.0, 0.3], [2.0, 1.0]),
    "ads": ([0.0, 0.7, 0.4], [2.0, 0.3, 0.5]),
    "ads_conformal": ([0.0, 0.2, 0.4], [2.0, 0.3, 0.5]),
    "asympt_ads": ([0.0, 0.3, 0.4], [2.0, 0.3, 0.5]),
    "cone_triple": ([0.0, 0.1, 0.2], [2.0, 1.0, 0.0]),
    "stationary": ([0.0, 0.2, 0.1], [2.0, 0.5, 0.3]),
    "product_cone_surface": ([0.0, -0.5, 0.1], [2.0, 0.3, 0.5]),
    "product_slit_plane": ([0.0, 0.1, 0.0], [2.0, 0.3, 0.5]),
    "cylinder_strip": ([0.0, 0.5], [2.0, 1.0]),
}


@check("finite_difference_oracles", ["oracle", "models"],
       "fundamental tensor and Christoffel symbols match finite differences on every catalog model")
def finite_difference_oracles(ctx: CheckContext) -> Measurement:
    tensor_gap, gamma_gap, gaps = 0.0, 0.0, {}
    for name in sorted(CATALOG):
        model = build_model(name, CATALOG[name].params)
        p, v = ORACLE_SAMPLES[name]
        g = fundamental_tensor(model, p, v, ctx.tol).as_array()
        gamma = christoffel_array(model, p, v, ctx.tol)
        gaps[name] = [relative_gap(fd_fundamental_matrix(model.lagrangian, p, v), g),
                      relative_gap(fd_christoffel(model.lagrangian, p, v), gamma)]
        tensor_gap, gamma_gap = max(tensor_gap, gaps[name][0]), max(gamma_gap, gaps[name][1])
    return Measurement(criteria=[("fundamental_tensor", tensor_gap, 1e-5), ("christoffel", gamma_gap, 1e-5)],
                       details={"gaps": gaps})


# ---------------------------------------------------------------------------
# Lightspace
# ---------------------------------------------------------------------------
@check("cylinder_lightspace", ["lightspace"],
       "cylinder strip: two classes per interior point, one boundary direction, no boundary identifications")
def cylinder_lightspace(ctx: CheckContext) -> Measurement:
    model = make_cylinder_strip()
    surface = CauchySurface(level=0.0)
    plus = sample_chart_interior(model, surface, grid=9, dirs=2, sign=1, tol=ctx.tol, seed=ctx.seed)
    minus = sample_chart_interior(model, surface, grid=9, dirs=2, sign=-1, tol=ctx.tol, seed=ctx.seed)
    plus_boundary = sample_chart_boundary(model, surface, 1, grid=2, times=(0.0,), tol=ctx.tol, seed=ctx.seed)
    minus_boundary = sample_chart_boundary(model, surface, -1, grid=2, times=(0.0,), tol=ctx.tol, seed=ctx.seed)
    glued = glue_charts(plus + plus_boundary, minus + minus_boundary)

    per_point: Dict[float, set] = {}
    for index, q in enumerate(plus):
        per_point.setdefault(round(float(q.p[1]), 12), set()).add(glued.class_of(ChartKind.PLUS_INTERIOR, index))
    bad_interior = sum(1 for classes in per_point.values() if len(classes) != 2)
    unmatched = sum(1 for c in glued.classes if not any(chart.is_boundary for chart in c.charts) and len(c.members) != 2)

    per_boundary: Dict[Tuple[int, float], int] = {}
    for q in plus_boundary + minus_boundary:
        key = (q.chart.sign, round(float(q.p[1]), 12))
        per_boundary[key] = per_boundary.get(key, 0) + 1
    bad_boundary = sum(1 for count in per_boundary.values() if count != 1)
    glued_boundary = sum(1 for c in glued.classes if any(chart.is_boundary for chart in c.charts) and len(c.members) != 1)
    dims = {len(q.coordinates) for q in plus + minus + plus_boundary + minus_boundary}
    return Measurement(
        criteria=[("interior_points_without_two_classes", float(bad_interior + unmatched), 0.0),
                  ("boundary_points_without_one_direction", float(bad_boundary), 0.0),
                  ("identified_boundary_points", float(glued_boundary), 0.0),
                  ("dimension_mismatch", _flag(dims == {1}), 0.0)],
        details={"interior_points": len(per_point), "boundary_points": len(per_boundary), "classes": len(glued.classes)},
    )


def _certificate_criteria(cert) -> List[Tuple[str, float, float]]:
    return [("missing_certificate", _flag(cert is not None), 0.0),
            ("invalid_certificate", _flag(cert is not None and validate_certificate(cert)), 0.0)]


@check("nonhausdorff_cone_surface", ["lightspace", "nonhausdorff"],
       "gamma_k = (s, -1/k, s) converges to both lifts of sigma_+- on the cone surface")
def nonhausdorff_cone_surface(ctx: CheckContext) -> Measurement:
    family, candidates = cone_surface_construction()
    cert = detect_nonhausdorff(build_model("product_cone_surface"), family, candidates, horizon=2.0,
                               threshold=1e-4, tol=ctx.tol, jobs=ctx.jobs)
    details = {}
    if cert is not None:
        details = {"separation": cert.separation, "distances": [max(e.d_a, e.d_b) for e in cert.evidence]}
    return Measurement(criteria=_certificate_criteria(cert), details=details)


@check("nonhausdorff_slit_plane", ["lightspace", "nonhausdorff", "slow"],
       "lifted slit-plane minimizers sigma_m converge to both sigma_- and sigma_+")
def nonhausdorff_slit_plane(ctx: CheckContext) -> Measurement:
    model = make_product_slit_plane(K=SLIT_PLANE_K)
    lifts, eps, candidates = slit_plane_construction(model)
    lengths = [float(lift.points[-1, 0] - lift.points[0, 0]) for lift in lifts]
    cert = detect_nonhausdorff(model, lifts, candidates, horizon=2.0, threshold=0.25, eps=eps,
                               tol=ctx.tol, jobs=ctx.jobs)
    outside = sum(1 for length in lengths if not 1.0 < length < 4.0)
    return Measurement(criteria=[*_certificate_criteria(cert), ("lengths_outside_range", float(outside), 0.0)],
                       details={"lengths": lengths})


def _strip_family() -> Tuple[FamilySpec, List[CandidateSpec]]:
    """Null lines x = t - 1/k of the strip against two windows of their single limit x = t."""
    ks = (10, 100, 1000)
    family = FamilySpec(eps=[1.0 / k for k in ks],
                        members=[InitialData(point=[0.0, -1.0 / k], velocity=[1.0, 1.0]) for k in ks])
    window = ParameterWindow(lo=-0.3, hi=0.3)
    candidates = [CandidateSpec(initial=InitialData(point=[a, a], velocity=[1.0, 1.0]), window=window)
                  for a in (0.3, -0.3)]
    return family, candidates


@check("hausdorff_minkowski", ["lightspace", "nonhausdorff"], "no certificate for lines of Minkowski space")
def hausdorff_minkowski(ctx: CheckContext) -> Measurement:
    # in flat space both candidates lie on the one limit line
    family, candidates = cone_surface_construction()
    cert = detect_nonhausdorff(make_minkowski(n=2), family, candidates, horizon=2.0, tol=ctx.tol, jobs=ctx.jobs)
    return Measurement(criteria=[("unexpected_certificate", _flag(cert is None), 0.0)])


@check("hausdorff_cylinder_strip", ["lightspace", "nonhausdorff"], "no certificate on the lightconvex cylinder strip")
def hausdorff_cylinder_strip(ctx: CheckContext) -> Measurement:
    family, candidates = _strip_family()
    cert = detect_nonhausdorff(make_cylinder_strip(), family, candidates, horizon=2.0, tol=ctx.tol, jobs=ctx.jobs)
    return Measurement(criteria=[("unexpected_certificate", _flag(cert is None), 0.0)])


# ---------------------------------------------------------------------------
# Fermat correspondence
# ---------------------------------------------------------------------------
@check("fermat_null_speed", ["fermat", "flow"], "traced lightlike geodesics satisfy t' = F(x')")
def fermat_null_speed(ctx: CheckContext) -> Measurement:
    model = make_stationary(domain="plane", omega_kind="rotation", omega_value=0.3)
    metric = fermat_metric(model)
    rng = np.random.default_rng(ctx.seed)
    data = []
    for _ in range(4):
        p = np.array([0.0, *rng.uniform(-0.5, 0.5, 2)])
        v = cone_direction_solve(model, p, [0.0, *rng.normal(0.0, 1.0, 2)], tol=ctx.tol)
        data.append(InitialData(point=p.tolist(), velocity=v.tolist()))
    worst = 0.0
    for solution in batch_integrate(model, data, 3.0, jobs=ctx.jobs, tol=ctx.tol):
        for sample in solution.samples:
            speed = metric(sample.x[1:], sample.v[1:])
            worst = max(worst, abs(sample.v[0] - speed) / max(1.0, abs(sample.v[0])))
    return Measurement(criteria=[("speed_gap", worst, 1e-8)])


@check("fermat_convexity_correspondence", ["fermat", "boundary"],
       "boundary lightconvexity equals Fermat convexity of dS on a disk and a Cassini dumbbell")
def fermat_convexity_correspondence(ctx: CheckContext) -> Measurement:
    models = {"disk": make_stationary(domain="disk", omega_kind="constant", omega_value=0.3),
              "cassini": make_stationary(domain="cassini")}
    verdicts = {}
    for label, model in models.items():
        light = classify_boundary_convexity(model, "light", grid=24, dirs=2, tol=ctx.tol, seed=ctx.seed)
        fermat = fermat_boundary_convexity(model, grid=24, dirs=2, tol=ctx.tol, seed=ctx.seed)
        verdicts[label] = [light.summary.verdict.value, fermat.summary.verdict.value]
    mismatches = sum(1 for light, fermat in verdicts.values() if light != fermat)
    return Measurement(
        criteria=[("verdict_mismatches", float(mismatches), 0.0),
                  ("expected_verdicts", _flag(verdicts["disk"][0] == Verdict.CONVEX.value
                                              and verdicts["cassini"][0] == Verdict.STRICTLY_CONCAVE.value), 0.0)],
        details={"verdicts": verdicts},
    )


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------
def run_check(spec: AcceptanceCheck, ctx: CheckContext, tolerance_override: Optional[float] = None) -> CheckResult:
    started = time.perf_counter()
    try:
        measurement = spec.run(ctx)
    except Exception as e:
        logger.error(f"Check {spec.name} raised", exc_info=True)
        return CheckResult(name=spec.name, tags=spec.tags, description=spec.description, status="error",
                           message=f"{type(e).__name__}: {e}")
    criteria = []
    for label, value, tolerance in measurement.criteria:
        limit = tolerance if tolerance_override is None else tolerance_override
        criteria.append(Criterion(name=label, value=float(value), tolerance=limit,
                                  passed=bool(math.isfinite(value) and value <= limit)))
    status = "passed" if all(c.passed for c in criteria) else "failed"
    logger.info(f"{spec.name}: {status} in {time.perf_counter() - started:.2f}s")
    return CheckResult(name=spec.name, tags=spec.tags, description=spec.description, status=status,
                       criteria=criteria, details=measurement.details)


def select_checks(only: Optional[Sequence[str]] = None) -> List[AcceptanceCheck]:
    return [spec for spec in CHECKS if spec.selected(only)]


def verify_paper(only: Optional[Sequence[str]] = None, tolerance_override: Optional[float] = None, seed: int = 0,
                 jobs: int = 1, tol: Optional[ToleranceConfig] = None) -> VerificationReport:
    """Run the selected checks (names or tags in ``only``) and assemble the report in manifest order."""
    ctx = CheckContext(seed=seed, jobs=jobs, tol=resolve_tolerances(tol))
    # checks run one after another; jobs parallelizes the samples inside each check
    results = [run_check(spec, ctx, tolerance_override) for spec in select_checks(only)]
    failed = [r.name for r in results if not r.passed]
    logger.info(f"verify-paper: {len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        logger.warning(f"Failed checks: {', '.join(failed)}")
    return VerificationReport(seed=seed, only=list(only) if only else None, tolerance_override=tolerance_override,
                              checks=results, passed=not failed, failed=failed)
