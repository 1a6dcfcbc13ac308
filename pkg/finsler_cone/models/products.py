"""Standard stationary models R x S: Minkowski, strips, cylinders, Cassini dumbbells,
and the vertexless cone surface."""
import math
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
import torch

from finsler_cone.core.errors import ChartLeakError, ConfigError
from finsler_cone.models.base import ChartTransition, SpacetimeModel, StationaryData
from finsler_cone.utils.sampling import sphere_directions


def euclidean_metric(xs: torch.Tensor) -> torch.Tensor:
    return torch.diag(torch.ones_like(xs))


def zero_form(xs: torch.Tensor) -> torch.Tensor:
    return torch.zeros_like(xs)


def constant_form(components: Sequence[float]) -> Callable[[torch.Tensor], torch.Tensor]:
    def omega(xs: torch.Tensor) -> torch.Tensor:
        return torch.zeros_like(xs) + torch.as_tensor(list(components), dtype=xs.dtype, device=xs.device)
    return omega


def rotation_form(strength: float) -> Callable[[torch.Tensor], torch.Tensor]:
    """omega = c (-y dx + x dy) on the plane."""
    def omega(xs: torch.Tensor) -> torch.Tensor:
        return strength * torch.stack([-xs[1], xs[0]])
    return omega


def stationary_lagrangian(data: StationaryData):
    """L = vt^2 - 2 omega(v_S) vt - g_S(v_S, v_S), i.e. minus the metric -dt^2 + 2 omega dt + g_S."""
    g_S, omega = data.g_S, data.omega

    def lagrangian(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
        xs, vs = x[1:], v[1:]
        return v[0] * v[0] - 2.0 * torch.dot(omega(xs), vs) * v[0] - vs @ g_S(xs) @ vs

    return lagrangian


def product_model(name: str, data: StationaryData, params: dict,
                  time_range: Tuple[float, float] = (-math.inf, math.inf),
                  max_step: Optional[float] = None) -> SpacetimeModel:
    """Lift spatial data to R x S with temporal coordinate t = x^0 and Omega = dt."""
    dim = data.spatial_dim + 1

    boundary = None
    rigging = None
    sampler = None
    if data.boundary is not None:
        spatial_boundary = data.boundary

        def boundary(x: torch.Tensor) -> torch.Tensor:
            return spatial_boundary(x[1:])

        if data.rigging is not None:
            spatial_rigging = data.rigging

            def rigging(x: np.ndarray) -> np.ndarray:
                return np.concatenate([[0.0], spatial_rigging(np.asarray(x)[1:])])

    if data.boundary_sampler is not None:
        spatial_sampler = data.boundary_sampler

        def sampler(count: int) -> np.ndarray:
            points = spatial_sampler(count)
            return np.hstack([np.zeros((points.shape[0], 1)), points])

    transition = None
    if data.transition is not None:
        spatial = data.transition

        def apply(x: np.ndarray, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            xs, vs = spatial.apply(x[1:], v[1:])
            return np.concatenate([[x[0]], xs]), np.concatenate([[v[0]], vs])

        transition = ChartTransition(name=spatial.name, event=lambda x: spatial.event(x[1:]), apply=apply)

    domain_fns = [(lambda fn: (lambda x: fn(x[1:])))(fn) for fn in data.domain_fns]

    return SpacetimeModel(
        name=name,
        dim=dim,
        params=params,
        lower=[time_range[0], *data.lower],
        upper=[time_range[1], *data.upper],
        lagrangian=stationary_lagrangian(data),
        orientation=lambda x: np.eye(dim)[0],
        boundary=boundary,
        rigging=rigging,
        temporal_index=0,
        domain_fns=domain_fns,
        transition=transition,
        stationary=data,
        boundary_sampler=sampler,
        max_step=max_step,
    )


# ---------------------------------------------------------------------------
# Spatial domains
# ---------------------------------------------------------------------------
def _half_space_data(n: int, omega) -> StationaryData:
    def boundary(xs: torch.Tensor) -> torch.Tensor:
        return xs[0]

    def sampler(count: int) -> np.ndarray:
        points = np.zeros((count, n))
        if n > 1:
            points[:, 1] = np.linspace(-1.0, 1.0, count)
        return points

    return StationaryData(spatial_dim=n, g_S=euclidean_metric, omega=omega,
                          lower=[-math.inf] * n, upper=[math.inf] * n,
                          boundary=boundary, boundary_sampler=sampler)


def _disk_data(n: int, radius: float, omega, exterior: bool = False) -> StationaryData:
    sign = -1.0 if exterior else 1.0

    def boundary(xs: torch.Tensor) -> torch.Tensor:
        return sign * (radius * radius - torch.sum(xs * xs)) / (2.0 * radius)

    def rigging(xs: np.ndarray) -> np.ndarray:
        return -sign * np.asarray(xs, dtype=float) / radius

    def sampler(count: int) -> np.ndarray:
        return radius * sphere_directions(n, count)

    return StationaryData(spatial_dim=n, g_S=euclidean_metric, omega=omega,
                          lower=[-4.0 * radius] * n, upper=[4.0 * radius] * n,
                          boundary=boundary, rigging=rigging, boundary_sampler=sampler)


def cassini_points(count: int, a: float = 1.0, c: float = 1.2) -> np.ndarray:
    """Exact points of the Cassini oval via its polar form (requires c >= a)."""
    theta = 2.0 * math.pi * np.arange(count) / count
    r_sq = a * a * np.cos(2.0 * theta) + np.sqrt(c ** 4 - a ** 4 * np.sin(2.0 * theta) ** 2)
    r = np.sqrt(r_sq)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)


def _cassini_data(a: float, c: float, omega) -> StationaryData:
    if c < a:
        raise ConfigError(f"Cassini oval with c < a is disconnected (a={a}, c={c})")

    def boundary(xs: torch.Tensor) -> torch.Tensor:
        x, y = xs[0], xs[1]
        rho = x * x + y * y
        return c ** 4 - (rho * rho - 2.0 * a * a * (x * x - y * y) + a ** 4)

    return StationaryData(spatial_dim=2, g_S=euclidean_metric, omega=omega,
                          lower=[-3.0 * c, -3.0 * c], upper=[3.0 * c, 3.0 * c],
                          boundary=boundary, boundary_sampler=lambda count: cassini_points(count, a, c))


def _omega_field(n: int, omega_kind: str, omega_value) -> Callable:
    if omega_kind == "zero":
        return zero_form
    if omega_kind == "constant":
        components = list(omega_value) if isinstance(omega_value, (list, tuple)) else [float(omega_value)] + [0.0] * (n - 1)
        if len(components) != n:
            raise ConfigError(f"omega needs {n} components, got {len(components)}")
        return constant_form(components)
    if omega_kind == "rotation":
        if n != 2:
            raise ConfigError("rotation omega is only defined on the plane")
        return rotation_form(float(omega_value))
    raise ConfigError(f"Unknown omega kind {omega_kind}")


def make_stationary(n: int = 2,
                    domain: Literal["plane", "half_space", "disk", "disk_exterior", "cassini"] = "disk",
                    radius: float = 1.0,
                    omega_kind: Literal["zero", "constant", "rotation"] = "zero",
                    omega_value=0.0,
                    cassini_a: float = 1.0,
                    cassini_c: float = 1.2) -> SpacetimeModel:
    """-dt^2 + 2 omega dt + g_S over a spatial domain with Euclidean g_S."""
    omega = _omega_field(n, omega_kind, omega_value)
    if domain == "plane":
        data = StationaryData(spatial_dim=n, g_S=euclidean_metric, omega=omega,
                              lower=[-math.inf] * n, upper=[math.inf] * n)
    elif domain == "half_space":
        data = _half_space_data(n, omega)
    elif domain in ("disk", "disk_exterior"):
        data = _disk_data(n, radius, omega, exterior=domain == "disk_exterior")
    elif domain == "cassini":
        if n != 2:
            raise ConfigError("the Cassini dumbbell is planar")
        data = _cassini_data(cassini_a, cassini_c, omega)
    else:
        raise ConfigError(f"Unknown spatial domain {domain}")
    data = data.model_copy(update={"static": omega_kind == "zero"})
    params = {"n": n, "domain": domain, "radius": radius, "omega_kind": omega_kind,
              "omega_value": omega_value, "cassini_a": cassini_a, "cassini_c": cassini_c}
    return product_model("stationary", data, params)


def make_minkowski(n: int = 1, half_space: bool = False) -> SpacetimeModel:
    """Minkowski L = vt^2 - |v_S|^2, optionally restricted to {x^1 >= 0}."""
    if half_space:
        data = _half_space_data(n, zero_form)
    else:
        data = StationaryData(spatial_dim=n, g_S=euclidean_metric, omega=zero_form,
                              lower=[-math.inf] * n, upper=[math.inf] * n)
    data = data.model_copy(update={"static": True})
    return product_model("minkowski", data, {"n": n, "half_space": half_space})


def make_cylinder_strip(interval: Tuple[float, float] = (-math.inf, math.inf)) -> SpacetimeModel:
    """I x [-1, 1] in L^2 with b = 1 - |x|; |x| is non-smooth only at x = 0 where b = 1."""

    def boundary(xs: torch.Tensor) -> torch.Tensor:
        return 1.0 - torch.abs(xs[0])

    def rigging(xs: np.ndarray) -> np.ndarray:
        return np.array([-math.copysign(1.0, float(xs[0]))])

    def sampler(count: int) -> np.ndarray:
        return np.array([[1.0], [-1.0]])[: max(1, min(count, 2))]

    data = StationaryData(spatial_dim=1, g_S=euclidean_metric, omega=zero_form,
                          lower=[-3.0], upper=[3.0], boundary=boundary, rigging=rigging,
                          boundary_sampler=sampler, static=True)
    return product_model("cylinder_strip", data, {"interval": [str(b) if not math.isfinite(b) else b for b in interval]},
                         time_range=interval)


# ---------------------------------------------------------------------------
# Vertexless cone surface
# ---------------------------------------------------------------------------
CONE_WEDGE = math.pi / 4.0
CONE_R_MIN = 1e-7


def _wedge_margin(xs: np.ndarray) -> float:
    """|theta| - pi/4: positive on the sector, zero on both cut rays."""
    return abs(math.atan2(float(xs[1]), float(xs[0]))) - CONE_WEDGE


def _rotate(vec: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1]])


def _deck_transformation(xs: np.ndarray, vs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Glue theta = pi/4 to theta = -pi/4 by rotation of -pi/2 (and back by +pi/2)."""
    theta = math.atan2(float(xs[1]), float(xs[0]))
    angle = -math.pi / 2.0 if theta >= 0.0 else math.pi / 2.0
    new_x, new_v = _rotate(xs, angle), _rotate(vs, angle)
    r = float(np.hypot(*new_x))
    new_theta = math.atan2(float(new_x[1]), float(new_x[0]))
    angular_rate = (new_x[0] * new_v[1] - new_x[1] * new_v[0]) / max(r * r, 1e-300)
    leaving = angular_rate < 0.0 if new_theta < 0.0 else angular_rate > 0.0
    if not (CONE_R_MIN < r < 1.0) or abs(abs(new_theta) - CONE_WEDGE) > 1e-6 or not leaving:
        raise ChartLeakError(
            f"No deck continuation at x={xs.tolist()}, v={vs.tolist()} (mapped to {new_x.tolist()})"
        )
    return new_x, new_v


def make_product_cone_surface(max_step: float = 0.05) -> SpacetimeModel:
    """L x S with S the flat sector r in (0, 1), |theta| >= pi/4, cut rays glued by rotation."""
    transition = ChartTransition(name="cone_deck_rotation", event=_wedge_margin, apply=_deck_transformation)
    data = StationaryData(
        spatial_dim=2,
        g_S=euclidean_metric,
        omega=zero_form,
        lower=[-1.0, -1.0],
        upper=[1.0, 1.0],
        domain_fns=[lambda xs: 1.0 - float(xs[0] ** 2 + xs[1] ** 2),
                    lambda xs: float(xs[0] ** 2 + xs[1] ** 2) - CONE_R_MIN ** 2],
        transition=transition,
        static=True,
    )
    return product_model("product_cone_surface", data, {"wedge": CONE_WEDGE, "r_min": CONE_R_MIN},
                         max_step=max_step)


def cone_surface_points(count: int, radius: float = 0.5) -> List[np.ndarray]:
    """Sector points at fixed radius, avoiding the removed wedge."""
    thetas = np.linspace(CONE_WEDGE + 0.05, 2.0 * math.pi - CONE_WEDGE - 0.05, count)
    return [radius * np.array([math.cos(t), math.sin(t)]) for t in thetas]
