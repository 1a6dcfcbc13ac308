"""Forward-mode differentiation engine.

Model Lagrangians are torch callables ``L(x, v) -> 0-d tensor`` and scalar
fields are ``phi(x) -> 0-d tensor``. Derivatives are taken with nested
``torch.func.jacfwd`` in float64, so every Hessian and third derivative is
exact to machine precision. Callables must be written with torch ops only
(``torch.where`` / ``clamp`` instead of Python branches on tensor values)
because ``jacfwd`` vectorizes them with ``vmap``.
"""
from typing import Callable, Tuple

import numpy as np
import torch
from torch.func import jacfwd

from finsler_cone.utils.device_utils import get_device_and_dtype

Lagrangian = Callable[[torch.Tensor, torch.Tensor], torch.Tensor]
ScalarField = Callable[[torch.Tensor], torch.Tensor]

_DEVICE, _DTYPE = get_device_and_dtype()


def to_tensor(values) -> torch.Tensor:
    return torch.as_tensor(np.asarray(values, dtype=np.float64), dtype=_DTYPE, device=_DEVICE)


def to_numpy(tensor: torch.Tensor) -> np.ndarray:
    return tensor.detach().cpu().numpy(force=True).astype(np.float64)


def lagrangian_value(L: Lagrangian, x, v) -> float:
    return float(L(to_tensor(x), to_tensor(v)))


def fundamental_matrix(L: Lagrangian, x, v) -> np.ndarray:
    """g_v = 1/2 Hess_v L."""
    hess = jacfwd(jacfwd(L, argnums=1), argnums=1)(to_tensor(x), to_tensor(v))
    return 0.5 * to_numpy(hess)


def fundamental_matrix_with_derivative(L: Lagrangian, x, v) -> Tuple[np.ndarray, np.ndarray]:
    """Return (g, dg) with dg[a, b, c] = d g_ab / d x^c at fixed direction v."""

    def g_with_aux(xt, vt):
        g = 0.5 * jacfwd(jacfwd(L, argnums=1), argnums=1)(xt, vt)
        return g, g

    dg, g = jacfwd(g_with_aux, argnums=0, has_aux=True)(to_tensor(x), to_tensor(v))
    return to_numpy(g), to_numpy(dg)


def euler_lagrange_terms(L: Lagrangian, x, v) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (H, M, dL/dx) with H = Hess_v L and M[l, i] = d^2 L / dv^l dx^i."""

    def velocity_gradient(xt, vt):
        grad = jacfwd(L, argnums=1)(xt, vt)
        return grad, grad

    xt, vt = to_tensor(x), to_tensor(v)
    (hess, mixed), _ = jacfwd(velocity_gradient, argnums=(1, 0), has_aux=True)(xt, vt)
    grad_x = jacfwd(L, argnums=0)(xt, vt)
    return to_numpy(hess), to_numpy(mixed), to_numpy(grad_x)


def scalar_value_and_gradient(phi: ScalarField, x) -> Tuple[float, np.ndarray]:
    def with_aux(xt):
        value = phi(xt)
        return value, value

    grad, value = jacfwd(with_aux, has_aux=True)(to_tensor(x))
    return float(value), to_numpy(grad)


def scalar_gradient(phi: ScalarField, x) -> np.ndarray:
    return to_numpy(jacfwd(phi)(to_tensor(x)))


def scalar_hessian(phi: ScalarField, x) -> np.ndarray:
    return to_numpy(jacfwd(jacfwd(phi))(to_tensor(x)))


def scalar_value(phi: ScalarField, x) -> float:
    return float(phi(to_tensor(x)))
