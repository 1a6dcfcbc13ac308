"""Anti-de Sitter family: AdS in polar coordinates, its conformal compactification
and asymptotically AdS perturbations of the latter."""
import logging
import math
from typing import List, Literal, Optional

import numpy as np
import torch
from pydantic import BaseModel, Field

from finsler_cone.core.errors import ConfigError, DecayViolationError
from finsler_cone.models.base import SpacetimeModel
from finsler_cone.services.constant_cache import ConstantCache
from finsler_cone.utils.sampling import hyperspherical_angles, sphere_directions

logger = logging.getLogger(__name__)

R_MIN = 1e-6
R_MAX = 1e6


def sphere_quadratic(angles: torch.Tensor, rates: torch.Tensor) -> torch.Tensor:
    """Round metric of S^m in hyperspherical angles: sum_i (prod_{j<i} sin^2) rate_i^2."""
    total = torch.zeros_like(rates[0])
    weight = torch.ones_like(rates[0])
    for i in range(rates.shape[0]):
        total = total + weight * rates[i] * rates[i]
        weight = weight * torch.sin(angles[i]) ** 2
    return total


def _angle_bounds(n: int) -> tuple[List[float], List[float]]:
    m = n - 1
    lower = [0.0] * (m - 1) + [-math.inf]
    upper = [math.pi] * (m - 1) + [math.inf]
    return lower, upper


def _sphere_points(n: int, count: int) -> np.ndarray:
    """Hyperspherical angles of quasi-uniform points of S^(n-1)."""
    if n == 2:
        return (2.0 * math.pi * np.arange(count) / count)[:, None]
    return np.array([hyperspherical_angles(e) for e in sphere_directions(n, count)])


def z_star() -> float:
    """z_* = int_2^inf dr / (r sqrt(1 + r^2)), memoized in the constant cache."""
    from scipy.integrate import quad

    def compute() -> float:
        value, _ = quad(lambda r: 1.0 / (r * math.sqrt(1.0 + r * r)), 2.0, math.inf,
                        epsabs=1e-14, epsrel=1e-13, limit=200)
        return value

    return ConstantCache.get_cache().get_or_compute("ads_conformal.z_star", compute)


def z_of_r(r: float) -> float:
    return math.asinh(0.5) - math.asinh(1.0 / r)


def r_of_z(z: float, zs: Optional[float] = None) -> float:
    zs = z_star() if zs is None else zs
    return 1.0 / math.sinh(zs - z)


def make_ads(n: int = 2, region: Literal["inner", "outer", "full"] = "inner", r0: float = 1.0,
             r_max: float = R_MAX) -> SpacetimeModel:
    """AdS_{n+1} in coordinates (t, r, theta_1..theta_{n-1}), sign convention (+, -, ..., -)."""
    if n < 2:
        raise ConfigError(f"AdS needs n >= 2, got {n}")
    if region != "full" and r0 <= 0:
        raise ConfigError(f"r0 must be positive, got {r0}")

    def lagrangian(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
        r = x[1]
        lapse = 1.0 + r * r
        return lapse * v[0] * v[0] - v[1] * v[1] / lapse - r * r * sphere_quadratic(x[2:], v[2:])

    angle_lower, angle_upper = _angle_bounds(n)
    lower = [-math.inf, R_MIN] + angle_lower
    upper = [math.inf, r_max] + angle_upper
    dim = n + 1

    boundary = None
    rigging = None
    sampler = None
    if region in ("inner", "outer"):
        sign = 1.0 if region == "inner" else -1.0

        def boundary(x: torch.Tensor) -> torch.Tensor:
            return sign * (r0 - x[1])

        def rigging(x: np.ndarray) -> np.ndarray:
            eta = np.zeros(dim)
            eta[1] = -sign * math.sqrt(1.0 + x[1] ** 2)
            return eta

        def sampler(count: int) -> np.ndarray:
            angles = _sphere_points(n, count)
            return np.array([[0.0, r0, *a] for a in angles])

    return SpacetimeModel(
        name="ads",
        dim=dim,
        params={"n": n, "region": region, "r0": r0, "r_max": r_max},
        lower=lower,
        upper=upper,
        lagrangian=lagrangian,
        orientation=lambda x: np.eye(dim)[0],
        boundary=boundary,
        rigging=rigging,
        temporal_index=0,
        boundary_sampler=sampler,
    )


def _conformal_ads(name: str, n: int, params: dict, perturbation=None, z_min: float = 0.0) -> SpacetimeModel:
    if n < 2:
        raise ConfigError(f"conformal AdS needs n >= 2, got {n}")
    zs = z_star()
    dim = n + 1

    def lagrangian(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
        s = zs - x[1]
        value = torch.cosh(s) ** 2 * v[0] * v[0] - v[1] * v[1] - sphere_quadratic(x[2:], v[2:])
        if perturbation is not None:
            value = value - perturbation.conformal_terms(s, v, x)
        return value

    def boundary(x: torch.Tensor) -> torch.Tensor:
        return zs - x[1]

    def rigging(x: np.ndarray) -> np.ndarray:
        eta = np.zeros(dim)
        eta[1] = -1.0
        return eta

    def sampler(count: int) -> np.ndarray:
        angles = _sphere_points(n, count)
        return np.array([[0.0, zs, *a] for a in angles])

    angle_lower, angle_upper = _angle_bounds(n)
    return SpacetimeModel(
        name=name,
        dim=dim,
        params={**params, "z_star": zs},
        lower=[-math.inf, z_min] + angle_lower,
        upper=[math.inf, zs + 1.0] + angle_upper,
        lagrangian=lagrangian,
        orientation=lambda x: np.eye(dim)[0],
        boundary=boundary,
        rigging=rigging,
        temporal_index=0,
        boundary_sampler=sampler,
    )


def make_ads_conformal(n: int = 2, z_min: float = 0.0) -> SpacetimeModel:
    """-f(z) dt^2 + dz^2 + g_S with f = cosh^2(z_* - z), boundary at z = z_*."""
    return _conformal_ads("ads_conformal", n, {"n": n, "z_min": z_min}, z_min=z_min)


class DecayProfile(BaseModel):
    """Perturbation h(r) of AdS; `constant` deliberately violates decay."""
    kind: Literal["exp", "power", "constant"] = "exp"
    coefficient: float = 1.0
    power: float = 2.0
    components: List[Literal["tt", "angular"]] = Field(default_factory=lambda: ["tt"])

    def value(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind == "exp":
            return self.coefficient * np.exp(-r)
        if self.kind == "power":
            return self.coefficient * r ** (-self.power)
        return self.coefficient * np.ones_like(r)

    def _h_of_s(self, s: torch.Tensor) -> torch.Tensor:
        """h(r(z)) with r = 1/sinh(s), identically 0 for s <= 0 (beyond the boundary)."""
        if self.kind == "exp":
            # exp(-1/sinh s) < 1e-21 below the cutoff
            inside = s > 0.02
            safe = torch.where(inside, s, torch.ones_like(s))
            return torch.where(inside, self.coefficient * torch.exp(-1.0 / torch.sinh(safe)), torch.zeros_like(s))
        inside = s > 0.0
        safe = torch.where(inside, s, torch.ones_like(s))
        if self.kind == "power":
            h = self.coefficient * torch.sinh(safe) ** self.power
        else:
            h = self.coefficient * torch.ones_like(s)
        return torch.where(inside, h, torch.zeros_like(s))

    def conformal_terms(self, s: torch.Tensor, v: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
        h = self._h_of_s(s)
        total = torch.zeros_like(s)
        if "tt" in self.components:
            # h_tt dt^2 rescaled by r^-2 = sinh^2(s)
            total = total + h * torch.sinh(s) ** 2 * v[0] * v[0]
        if "angular" in self.components:
            total = total + h * sphere_quadratic(x[2:], v[2:])
        return total

    def check_decay(self, radii=(1e2, 1e3, 1e4)) -> None:
        """Raise DecayViolationError unless |h| and |dh/dr| shrink along the test grid."""
        radii = np.asarray(radii, dtype=float)
        values = np.abs(self.value(radii))
        step = 1e-4 * radii
        slopes = np.abs((self.value(radii + step) - self.value(radii - step)) / (2.0 * step))
        for label, seq in (("h", values), ("dh/dr", slopes)):
            if seq[0] == 0.0 and seq[-1] == 0.0:
                continue
            if not (np.all(np.diff(seq) < 0.0) and seq[-1] <= 0.9 * seq[0]):
                raise DecayViolationError(
                    f"Profile {self.kind} fails the decay check for {label}: {seq.tolist()} at r = {radii.tolist()}"
                )


def make_asympt_ads(n: int = 2, profile: Optional[DecayProfile] = None) -> SpacetimeModel:
    """Conformal AdS plus a perturbation h with h, dh/dr -> 0 as r -> infinity."""
    profile = profile or DecayProfile()
    profile.check_decay()
    logger.debug(f"asympt_ads profile {profile.kind} passed the decay check")
    return _conformal_ads("asympt_ads", n, {"n": n, "profile": profile.model_dump()}, perturbation=profile)
