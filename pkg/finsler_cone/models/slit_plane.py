"""Plane (-inf, 1) x R with K vertical slits, each wrapped in a rectangle where a
conformal factor diverging at the slit makes the rectangle minus the slit complete."""
import math
from typing import List, Optional, Tuple

import numpy as np
import torch
from pydantic import BaseModel

from finsler_cone.core.errors import ConfigError
from finsler_cone.models.base import StationaryData
from finsler_cone.models.products import product_model, zero_form

MAX_SLITS = 12


class SlitRectangle(BaseModel):
    index: int
    a: float
    b: float
    c: float
    d: float
    x_mid: float
    half_width: float
    gap: float
    bottom: float
    top: float

    @classmethod
    def build(cls, k: int) -> "SlitRectangle":
        half_width = 1.0 / (3.0 * k * (k + 1))
        x_mid = 1.0 - 1.0 / k
        c = -1.0 + 2.0 ** (-k)
        d = 1.0 - 2.0 ** (-k)
        gap = 2.0 ** (-k - 1)
        return cls(index=k, a=x_mid - half_width, b=x_mid + half_width, c=c, d=d,
                   x_mid=x_mid, half_width=half_width, gap=gap, bottom=c + gap, top=d - gap)

    @property
    def slit(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.array([self.x_mid, self.bottom]), np.array([self.x_mid, self.top])


def rectangles(count: int) -> List[SlitRectangle]:
    if count < 1 or count > MAX_SLITS:
        raise ConfigError(f"slit plane supports 1 <= K <= {MAX_SLITS} rectangles, got {count}")
    return [SlitRectangle.build(k) for k in range(1, count + 1)]


def separation_level(m: int) -> float:
    """l_m = (b_m + a_{m+1}) / 2, the flat vertical line between R_m and R_{m+1}."""
    return 0.5 * (SlitRectangle.build(m).b + SlitRectangle.build(m + 1).a)


def _smootherstep(q: torch.Tensor) -> torch.Tensor:
    q = torch.clamp(q, 0.0, 1.0)
    return q * q * q * (q * (q * 6.0 - 15.0) + 10.0)


def conformal_factor(rects: List[SlitRectangle], kappa: float):
    """phi = 1 + sum_k kappa w_k^2 psi_k / dist(., V_k)^2, psi_k a C^2 bump vanishing on dR_k."""

    def phi(xs: torch.Tensor) -> torch.Tensor:
        x, y = xs[0], xs[1]
        total = torch.ones_like(x)
        for r in rects:
            u = torch.abs(x - r.x_mid) / r.half_width
            margin = torch.minimum(y - r.c, r.d - y)
            psi = _smootherstep(2.0 * (1.0 - u)) * _smootherstep(2.0 * margin / r.gap)
            dy = torch.clamp(y - r.top, min=0.0) + torch.clamp(r.bottom - y, min=0.0)
            dist_sq = torch.clamp((x - r.x_mid) ** 2 + dy * dy, min=1e-30)
            total = total + kappa * r.half_width ** 2 * psi / dist_sq
        return total

    return phi


def guide_curve(m: int, points_per_unit: int = 40) -> np.ndarray:
    """c_m: along sigma_- to x = l_m, up the vertical line, back along sigma_+."""
    level = separation_level(m)
    n_h = max(4, int(points_per_unit * level))
    n_v = max(8, int(points_per_unit * 2.0))
    bottom = np.stack([np.linspace(0.0, level, n_h), -np.ones(n_h)], axis=1)
    vertical = np.stack([np.full(n_v, level), np.linspace(-1.0, 1.0, n_v)], axis=1)[1:]
    top = np.stack([np.linspace(level, 0.0, n_h), np.ones(n_h)], axis=1)[1:]
    return np.vstack([bottom, vertical, top])


def make_product_slit_plane(K: int = 6, kappa: float = 1.0, region_m: Optional[int] = None):
    """L x S for the slit plane; region_m restricts to D_m = {x <= l_m}."""
    rects = rectangles(K)
    phi = conformal_factor(rects, kappa)

    def g_S(xs: torch.Tensor) -> torch.Tensor:
        return phi(xs) * torch.diag(torch.ones_like(xs))

    def off_slits(xs: np.ndarray) -> float:
        x, y = float(xs[0]), float(xs[1])
        best = math.inf
        for r in rects:
            dy = max(y - r.top, 0.0) + max(r.bottom - y, 0.0)
            best = min(best, (x - r.x_mid) ** 2 + dy * dy)
        return best - 1e-14

    boundary = None
    sampler = None
    if region_m is not None:
        if not 1 <= region_m < K:
            raise ConfigError(f"region_m must lie in [1, K-1], got {region_m}")
        level = separation_level(region_m)

        def boundary(xs: torch.Tensor) -> torch.Tensor:
            return level - xs[0]

        def sampler(count: int) -> np.ndarray:
            return np.stack([np.full(count, level), np.linspace(-2.0, 2.0, count)], axis=1)

    data = StationaryData(
        spatial_dim=2,
        g_S=g_S,
        omega=zero_form,
        lower=[-3.0, -3.0],
        upper=[1.0, 3.0],
        boundary=boundary,
        domain_fns=[off_slits],
        boundary_sampler=sampler,
        static=True,
    )
    params = {
        "K": K,
        "kappa": kappa,
        "region_m": region_m,
        "slits": [[r.x_mid, r.bottom, r.top] for r in rects],
    }
    return product_model("product_slit_plane", data, params)
