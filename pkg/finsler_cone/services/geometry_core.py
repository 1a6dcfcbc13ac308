import logging
import math
import warnings
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve, null_space
from scipy.optimize import brentq

from finsler_cone.core.errors import (
    BracketError,
    ConeDomainError,
    DegenerateTensorError,
    DomainError,
    NoRootError,
    NonTimelikeBoundaryError,
    NotOnBoundaryError,
)
from finsler_cone.models.base import SpacetimeModel
from finsler_cone.schemas.geometry import (
    CausalClass,
    FundamentalTensorValue,
    TangentSample,
    ToleranceConfig,
)
from finsler_cone.utils.autodiff import fundamental_matrix, lagrangian_value, scalar_value_and_gradient
from finsler_cone.utils.sampling import sphere_directions

logger = logging.getLogger(__name__)

TangentKind = Literal["light", "time", "space"]


def resolve_tolerances(tol: Optional[ToleranceConfig]) -> ToleranceConfig:
    return tol if tol is not None else ToleranceConfig.from_settings()


def _as_vectors(p, v) -> Tuple[np.ndarray, np.ndarray]:
    return np.asarray(p, dtype=float), np.asarray(v, dtype=float)


def _require_evaluable(model: SpacetimeModel, p: np.ndarray, v: np.ndarray, derivatives: bool) -> None:
    if p.shape != (model.dim,) or v.shape != (model.dim,):
        raise DomainError(f"{model.name} expects {model.dim} components, got point {p.shape} and vector {v.shape}")
    if not np.all(np.isfinite(p)) or not model.in_domain(p):
        raise DomainError(f"Point {p.tolist()} outside the domain of {model.name}")
    if not np.any(v):
        raise ConeDomainError("Zero vector has no causal character")
    if derivatives and not model.derivatives_available(p, v):
        raise ConeDomainError(f"Direction {v.tolist()} lies in the excluded conic neighborhood of {model.name}")


def lu_with_determinant(matrix: np.ndarray, floor: float) -> Tuple[Tuple[np.ndarray, np.ndarray], float]:
    """LU with partial pivoting; raises DegenerateTensorError if |det| < floor * scale^dim."""
    dim = matrix.shape[0]
    scale = max(1.0, float(np.max(np.abs(matrix))))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(matrix, check_finite=False)
    swaps = int(np.sum(piv != np.arange(dim)))
    det = float(np.prod(np.diag(lu))) * (-1.0 if swaps % 2 else 1.0)
    if not math.isfinite(det) or abs(det) < floor * scale ** dim:
        raise DegenerateTensorError(f"Fundamental tensor is degenerate: det = {det:.3e} (scale {scale:.3e})")
    return (lu, piv), det


def solve_with(factor: Tuple[np.ndarray, np.ndarray], rhs: np.ndarray) -> np.ndarray:
    return lu_solve(factor, rhs, check_finite=False)


def eval_L(model: SpacetimeModel, p, v) -> float:
    p, v = _as_vectors(p, v)
    _require_evaluable(model, p, v, derivatives=False)
    value = lagrangian_value(model.lagrangian, p, v)
    if not math.isfinite(value):
        raise ConeDomainError(f"L is not defined at ({p.tolist()}, {v.tolist()})")
    return value


def causal_classify(model: SpacetimeModel, p, v, tol: Optional[ToleranceConfig] = None) -> CausalClass:
    tol = resolve_tolerances(tol)
    p, v = _as_vectors(p, v)
    try:
        value = eval_L(model, p, v)
    except (DomainError, ConeDomainError):
        return CausalClass.OUTSIDE_DOMAIN
    if model.positive_definite:
        return CausalClass.SPACELIKE
    band = tol.classification * float(v @ v)
    if model.omega(p, v) > 0.0:
        if abs(value) <= band:
            return CausalClass.LIGHTLIKE
        if value > band:
            return CausalClass.TIMELIKE
    return CausalClass.SPACELIKE


def tangent_sample(model: SpacetimeModel, p, v, tol: Optional[ToleranceConfig] = None) -> TangentSample:
    tol = resolve_tolerances(tol)
    p, v = _as_vectors(p, v)
    return TangentSample(point=p.tolist(), vector=v.tolist(),
                         causal_class=causal_classify(model, p, v, tol), tolerance=tol.classification)


def fundamental_tensor(model: SpacetimeModel, p, v, tol: Optional[ToleranceConfig] = None) -> FundamentalTensorValue:
    tol = resolve_tolerances(tol)
    p, v = _as_vectors(p, v)
    _require_evaluable(model, p, v, derivatives=True)
    g = fundamental_matrix(model.lagrangian, p, v)
    g = 0.5 * (g + g.T)
    _, det = lu_with_determinant(g, tol.degeneracy_floor)
    return FundamentalTensorValue(base=tangent_sample(model, p, v, tol), matrix=g.tolist(), determinant=det)


def cone_direction_solve(model: SpacetimeModel, p, ray_seed, axis=None,
                         tol: Optional[ToleranceConfig] = None) -> np.ndarray:
    """Lightlike v = axis + s ray_seed with s > 0 the exit root of L along the ray."""
    tol = resolve_tolerances(tol)
    p, seed = _as_vectors(p, ray_seed)
    axis = model.axis(p) if axis is None else np.asarray(axis, dtype=float)

    along = float(seed @ axis) / float(axis @ axis)
    if np.linalg.norm(seed - along * axis) <= 1e-12 * np.linalg.norm(seed):
        raise BracketError("ray_seed is parallel to the axis")

    def along_ray(s: float) -> float:
        return eval_L(model, p, axis + s * seed)

    start = along_ray(0.0)
    if start <= tol.classification * float(axis @ axis) or model.omega(p, axis) <= 0.0:
        raise BracketError(f"L does not change sign on the bracket: axis {axis.tolist()} is not timelike (L = {start:.3e})")

    lo, hi = 0.0, 1.0
    while along_ray(hi) >= 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > tol.bracket_max:
            raise NoRootError(f"Ray {seed.tolist()} from axis {axis.tolist()} stays in the cone up to s = {tol.bracket_max:g}")

    s = brentq(along_ray, lo, hi, xtol=1e-15 * hi, rtol=4.0 * np.finfo(float).eps, maxiter=200)
    v = axis + s * seed
    residual = along_ray(s)
    if abs(residual) > tol.classification * float(v @ v):
        logger.warning(f"cone_direction_solve residual {residual:.3e} above tolerance at p={p.tolist()}")
    return v


# ---------------------------------------------------------------------------
# Boundary tangent sampling
# ---------------------------------------------------------------------------
def boundary_frame(model: SpacetimeModel, p, tol: Optional[ToleranceConfig] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Return (db, orthonormal basis of ker db) at a boundary point."""
    tol = resolve_tolerances(tol)
    p = np.asarray(p, dtype=float)
    if model.boundary is None:
        raise NotOnBoundaryError(f"Model {model.name} has no boundary")
    value, db = scalar_value_and_gradient(model.boundary, p)
    norm_db = float(np.linalg.norm(db))
    scale = max(1.0, float(np.linalg.norm(p))) * max(1.0, norm_db)
    if abs(value) > tol.classification * scale:
        raise NotOnBoundaryError(f"b({p.tolist()}) = {value:.3e} is not zero")
    if norm_db == 0.0:
        raise NotOnBoundaryError(f"db vanishes at {p.tolist()}; the boundary is not regular there")
    return db, null_space(db[None, :])


def _tangent_axis(model: SpacetimeModel, p: np.ndarray, kernel: np.ndarray, tol: ToleranceConfig, seed: int) -> np.ndarray:
    """A timelike vector inside ker db: the projected time axis, else the best sampled one."""
    axis = kernel @ (kernel.T @ model.axis(p))

    def timelike_score(w: np.ndarray) -> float:
        norm_sq = float(w @ w)
        if norm_sq == 0.0 or model.omega(p, w) <= 0.0:
            return -math.inf
        return eval_L(model, p, w) / norm_sq

    if timelike_score(axis) > tol.classification:
        return axis
    candidates = sphere_directions(kernel.shape[1], 64, seed) @ kernel.T
    candidates = np.vstack([candidates, -candidates])
    scores = [timelike_score(w) for w in candidates]
    best = int(np.argmax(scores))
    if scores[best] <= tol.classification:
        raise NonTimelikeBoundaryError(f"No timelike direction tangent to the boundary at {p.tolist()}")
    return candidates[best]


def sample_boundary_tangents(model: SpacetimeModel, p, kind: TangentKind, count: int,
                             tol: Optional[ToleranceConfig] = None, seed: int = 0) -> List[np.ndarray]:
    """Unit (aux norm) tangent directions of the requested causal kind at a boundary point.

    Positive definite models have no causal kinds: every tangent direction is returned.
    """
    tol = resolve_tolerances(tol)
    p = np.asarray(p, dtype=float)
    db, kernel = boundary_frame(model, p, tol)
    if model.positive_definite:
        directions = sphere_directions(kernel.shape[1], count, seed) @ kernel.T
        return [w / np.linalg.norm(w) for w in directions]

    axis = _tangent_axis(model, p, kernel, tol, seed)
    complement = null_space(np.vstack([db, axis]))
    if complement.shape[1] == 0:
        logger.debug(f"Boundary of {model.name} at {p.tolist()} is one dimensional: no null tangents")
        return []
    seeds = sphere_directions(complement.shape[1], count, seed) @ complement.T
    factor = {"light": 1.0, "time": 0.5, "space": 2.0}[kind]
    tangents = []
    for e in seeds:
        light = cone_direction_solve(model, p, e, axis, tol)
        s = float((light - axis) @ e) / float(e @ e)
        w = axis + factor * s * e
        tangents.append(w / np.linalg.norm(w))
    return tangents


def sample_boundary_light_tangents(model: SpacetimeModel, p, count: int,
                                   tol: Optional[ToleranceConfig] = None, seed: int = 0) -> List[np.ndarray]:
    return sample_boundary_tangents(model, p, "light", count, tol, seed)


# ---------------------------------------------------------------------------
# Model-level property checks
# ---------------------------------------------------------------------------
def _random_cone_interior(model: SpacetimeModel, p: np.ndarray, rng: np.random.Generator,
                          tol: ToleranceConfig) -> np.ndarray:
    axis = model.axis(p)
    e = rng.standard_normal(model.dim)
    e -= (e @ axis) / (axis @ axis) * axis
    light = cone_direction_solve(model, p, e, axis, tol)
    s = float((light - axis) @ e) / float(e @ e)
    return axis + rng.uniform(0.05, 0.9) * s * e


def signature_check(model: SpacetimeModel, points: Sequence[Sequence[float]], samples: int = 200,
                    seed: int = 0, tol: Optional[ToleranceConfig] = None) -> Dict[str, int]:
    """Count cone-interior samples whose fundamental tensor has signature (+, -, ..., -)."""
    tol = resolve_tolerances(tol)
    rng = np.random.default_rng(seed)
    passed = failed = 0
    for k in range(samples):
        p = np.asarray(points[k % len(points)], dtype=float)
        v = _random_cone_interior(model, p, rng, tol)
        eigenvalues = np.linalg.eigvalsh(fundamental_tensor(model, p, v, tol).as_array())
        if int(np.sum(eigenvalues > 0)) == 1 and int(np.sum(eigenvalues < 0)) == model.dim - 1:
            passed += 1
        else:
            failed += 1
            logger.warning(f"Signature violation in {model.name} at p={p.tolist()}, v={v.tolist()}: {eigenvalues}")
    return {"passed": passed, "failed": failed}


def homogeneity_check(model: SpacetimeModel, points: Sequence[Sequence[float]], samples: int = 1000,
                      seed: int = 0, tol: Optional[ToleranceConfig] = None) -> float:
    """Largest |L(lambda v) - lambda^2 L(v)| / (|L(v)| + 1e-3) over random cone-interior samples."""
    tol = resolve_tolerances(tol)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(samples):
        p = np.asarray(points[k % len(points)], dtype=float)
        v = _random_cone_interior(model, p, rng, tol)
        lam = rng.uniform(1e-3, 10.0)
        base = eval_L(model, p, v)
        gap = abs(eval_L(model, p, lam * v) - lam * lam * base)
        worst = max(worst, gap / (abs(base) + 1e-3))
    return worst
