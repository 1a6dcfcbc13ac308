"""Formal Christoffel symbols, geodesic spray and the Berwald Hessian of scalar fields."""
import logging
from typing import Optional

import numpy as np

from finsler_cone.models.base import SpacetimeModel
from finsler_cone.schemas.geometry import ChristoffelValue, SprayValue, ToleranceConfig
from finsler_cone.services.geometry_core import (
    _as_vectors,
    _require_evaluable,
    lu_with_determinant,
    resolve_tolerances,
    solve_with,
    tangent_sample,
)
from finsler_cone.utils.autodiff import (
    ScalarField,
    euler_lagrange_terms,
    fundamental_matrix_with_derivative,
    scalar_value_and_gradient,
    scalar_hessian,
)

logger = logging.getLogger(__name__)


def christoffel_array(model: SpacetimeModel, p, v, tol: Optional[ToleranceConfig] = None) -> np.ndarray:
    """Gamma^k_ij(p, v) = 1/2 g^kl (d_j g_li + d_i g_lj - d_l g_ij), derivatives at fixed v."""
    tol = resolve_tolerances(tol)
    p, v = _as_vectors(p, v)
    _require_evaluable(model, p, v, derivatives=True)
    g, dg = fundamental_matrix_with_derivative(model.lagrangian, p, v)
    g = 0.5 * (g + g.T)
    factor, _ = lu_with_determinant(g, tol.degeneracy_floor)
    first_kind = dg + np.einsum("lji->lij", dg) - np.einsum("ijl->lij", dg)
    dim = model.dim
    gamma = 0.5 * solve_with(factor, first_kind.reshape(dim, dim * dim)).reshape(dim, dim, dim)
    return 0.5 * (gamma + np.transpose(gamma, (0, 2, 1)))


def christoffel(model: SpacetimeModel, p, v, tol: Optional[ToleranceConfig] = None) -> ChristoffelValue:
    tol = resolve_tolerances(tol)
    gamma = christoffel_array(model, p, v, tol)
    return ChristoffelValue(base=tangent_sample(model, p, v, tol), gamma=gamma.tolist())


def spray(model: SpacetimeModel, p, v, tol: Optional[ToleranceConfig] = None) -> SprayValue:
    """G^k = Gamma^k_ij v^i v^j."""
    tol = resolve_tolerances(tol)
    v_arr = np.asarray(v, dtype=float)
    gamma = christoffel_array(model, p, v, tol)
    coeffs = np.einsum("kij,i,j->k", gamma, v_arr, v_arr)
    return SprayValue(base=tangent_sample(model, p, v, tol), coeffs=coeffs.tolist())


def spray_euler_lagrange(model: SpacetimeModel, p, v, tol: Optional[ToleranceConfig] = None) -> np.ndarray:
    """Spray from the Euler-Lagrange equations: G = (Hess_v L)^-1 (d_x d_v L . v - d_x L).

    Equal to Gamma^k_ij v^i v^j by 2-homogeneity, and cheaper: no third derivatives.
    """
    tol = resolve_tolerances(tol)
    p, v = _as_vectors(p, v)
    _require_evaluable(model, p, v, derivatives=True)
    return euler_lagrange_spray(model, p, v, tol.degeneracy_floor)


def euler_lagrange_spray(model: SpacetimeModel, p: np.ndarray, v: np.ndarray, floor: float) -> np.ndarray:
    """Unchecked spray for the integrator, which also evaluates slightly beyond the chart."""
    hess, mixed, grad_x = euler_lagrange_terms(model.lagrangian, p, v)
    g = 0.25 * (hess + hess.T)
    factor, _ = lu_with_determinant(g, floor)
    return solve_with(factor, 0.5 * (mixed @ v - grad_x))


def hessian(model: SpacetimeModel, phi: ScalarField, p, v_dir, z, w,
            tol: Optional[ToleranceConfig] = None) -> float:
    """Berwald Hessian Hess^{v_dir} phi (Z, W) = Z^i W^j (d_ij phi - Gamma^k_ij d_k phi).

    Symmetric in (Z, W) bit-for-bit.
    """
    tol = resolve_tolerances(tol)
    p = np.asarray(p, dtype=float)
    z, w = np.asarray(z, dtype=float), np.asarray(w, dtype=float)
    gamma = christoffel_array(model, p, v_dir, tol)
    _, grad = scalar_value_and_gradient(phi, p)
    second = scalar_hessian(phi, p)
    form = second - np.einsum("kij,k->ij", gamma, grad)
    form = 0.5 * (form + form.T)
    return 0.5 * (float(z @ form @ w) + float(w @ form @ z))
