"""Cone-triple Lagrangians L = Omega^2 - F(Pi v)^2 and randomized half-space models."""
import math
from typing import List, Literal, Optional, Sequence

import numpy as np
import torch

from finsler_cone.core.errors import ConfigError
from finsler_cone.models.base import SpacetimeModel, unbounded

# derivatives of |Pi v| are unavailable inside this conic neighborhood of the axis T
AXIS_EXCLUSION = 1e-3


def _randers_norm(u: torch.Tensor, beta: torch.Tensor, h: Optional[torch.Tensor] = None) -> torch.Tensor:
    quad = u @ u if h is None else u @ h @ u
    return torch.sqrt(quad) + torch.dot(beta, u)


def _off_axis(x: np.ndarray, v: np.ndarray) -> bool:
    spatial = float(np.linalg.norm(v[1:]))
    return spatial > AXIS_EXCLUSION * abs(float(v[0]))


def make_cone_triple(n: int = 2, norm: Literal["euclidean", "randers"] = "euclidean",
                     beta: Optional[Sequence[float]] = None) -> SpacetimeModel:
    """Triple (Omega = dt, T = d_t, F) on R x R^n."""
    if norm == "randers":
        beta_values = list(beta) if beta is not None else [0.3] + [0.0] * (n - 1)
        if len(beta_values) != n or math.sqrt(sum(b * b for b in beta_values)) >= 1.0:
            raise ConfigError(f"Randers beta must have {n} components and norm < 1, got {beta_values}")
    else:
        beta_values = [0.0] * n

    def lagrangian(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
        omega_v = v[0]
        projected = v[1:]
        if norm == "euclidean":
            return omega_v * omega_v - projected @ projected
        beta_t = torch.zeros_like(projected) + torch.as_tensor(beta_values, dtype=v.dtype, device=v.device)
        f = _randers_norm(projected, beta_t)
        return omega_v * omega_v - f * f

    lower, upper = unbounded(n + 1)
    return SpacetimeModel(
        name="cone_triple",
        dim=n + 1,
        params={"n": n, "norm": norm, "beta": beta_values},
        lower=lower,
        upper=upper,
        lagrangian=lagrangian,
        orientation=lambda x: np.eye(n + 1)[0],
        cone_domain=_off_axis if norm == "randers" else None,
    )


def make_perturbed_half_space(seed: int, kind: Literal["quadratic", "randers"] = "quadratic",
                              strength: float = 0.15) -> SpacetimeModel:
    """Random smooth Lorentz model on R^3 with a curved boundary b = x - k y^2/2 - mu t y.

    Coefficients depend on position linearly, so Christoffel symbols are nonzero.
    """
    rng = np.random.default_rng(seed)
    curvature = float(rng.uniform(-2.0, 2.0))
    twist = float(rng.uniform(-0.5, 0.5))
    dim = 3

    def sym(scale: float) -> np.ndarray:
        a = rng.normal(0.0, scale, (dim, dim))
        return 0.5 * (a + a.T)

    if kind == "quadratic":
        base = sym(1.0 / 3.0)
        slopes = [sym(1.0 / 3.0) for _ in range(dim)]
        eta = torch.as_tensor(np.diag([1.0, -1.0, -1.0]))
        base_t = torch.as_tensor(base)
        slopes_t = torch.as_tensor(np.stack(slopes))

        def lagrangian(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
            metric = eta + strength * (base_t + torch.einsum("k,kij->ij", x, slopes_t))
            return v @ metric @ v

        coefficients = {"base": base.tolist(), "slopes": [s.tolist() for s in slopes]}
        cone_domain = None
    elif kind == "randers":
        beta0 = rng.uniform(-0.3, 0.3, 2)
        beta_slope = rng.normal(0.0, 0.2, (2, dim))
        spatial = np.eye(2) + strength * sym(1.0 / 3.0)[:2, :2]
        beta0_t, beta_slope_t = torch.as_tensor(beta0), torch.as_tensor(beta_slope)
        spatial_t = torch.as_tensor(spatial)

        def lagrangian(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
            beta = beta0_t + beta_slope_t @ x
            f = _randers_norm(v[1:], beta, spatial_t)
            return v[0] * v[0] - f * f

        coefficients = {"beta0": beta0.tolist(), "beta_slope": beta_slope.tolist(), "spatial": spatial.tolist()}
        cone_domain = _off_axis
    else:
        raise ConfigError(f"Unknown perturbed half-space kind {kind}")

    def boundary(x: torch.Tensor) -> torch.Tensor:
        return x[1] - 0.5 * curvature * x[2] * x[2] - twist * x[0] * x[2]

    def sampler(count: int) -> np.ndarray:
        local = np.random.default_rng(seed + 7919)
        t = local.uniform(-0.2, 0.2, count)
        y = local.uniform(-0.2, 0.2, count)
        x = 0.5 * curvature * y * y + twist * t * y
        return np.stack([t, x, y], axis=1)

    return SpacetimeModel(
        name="perturbed_half_space",
        dim=dim,
        params={"seed": seed, "kind": kind, "curvature": curvature, "twist": twist,
                "strength": strength, **coefficients},
        lower=[-5.0] * dim,
        upper=[5.0] * dim,
        lagrangian=lagrangian,
        orientation=lambda x: np.eye(dim)[0],
        boundary=boundary,
        cone_domain=cone_domain,
        boundary_sampler=sampler,
    )
