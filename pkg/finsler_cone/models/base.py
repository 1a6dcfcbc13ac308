import math
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import torch
from pydantic import BaseModel, Field

from finsler_cone.utils.autodiff import Lagrangian, ScalarField, scalar_gradient

VectorField = Callable[[np.ndarray], np.ndarray]
DomainFunction = Callable[[np.ndarray], float]


class ChartTransition(BaseModel):
    """Deck transformation applied when a geodesic reaches a cut of a quotient chart.

    ``event(x)`` is positive on the chart and vanishes on the cut;
    ``apply(x, v)`` returns the continued state in the same chart.
    """
    name: str
    event: DomainFunction
    apply: Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class StationaryData(BaseModel):
    """Spatial data (g_S, omega) of a standard stationary model -dt^2 + 2 omega dt + g_S."""
    spatial_dim: int
    g_S: Callable[[torch.Tensor], torch.Tensor]
    omega: Callable[[torch.Tensor], torch.Tensor]
    lower: List[float]
    upper: List[float]
    boundary: Optional[ScalarField] = None
    rigging: Optional[VectorField] = None
    domain_fns: List[DomainFunction] = Field(default_factory=list)
    transition: Optional[ChartTransition] = None
    boundary_sampler: Optional[Callable[[int], np.ndarray]] = None
    static: bool = False

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    def fermat(self, xs: torch.Tensor, vs: torch.Tensor) -> torch.Tensor:
        """F(v) = omega(v) + sqrt(g_S(v, v) + omega(v)^2), the future null lift speed."""
        w = torch.dot(self.omega(xs), vs)
        return w + torch.sqrt(vs @ self.g_S(xs) @ vs + w * w)

    def polyline_length(self, vertices: torch.Tensor) -> torch.Tensor:
        """Midpoint-rule Fermat length of a polyline given as a (count, n) tensor."""
        segments = vertices[1:] - vertices[:-1]
        midpoints = 0.5 * (vertices[1:] + vertices[:-1])
        return torch.vmap(self.fermat)(midpoints, segments).sum()


class SpacetimeModel(BaseModel):
    name: str
    dim: int
    params: Dict[str, Any] = Field(default_factory=dict)
    lower: List[float]
    upper: List[float]
    lagrangian: Lagrangian
    # Omega as covector components at x; None for positive definite (Finsler) models
    orientation: Optional[VectorField] = None
    boundary: Optional[ScalarField] = None
    rigging: Optional[VectorField] = None
    time_axis: Optional[VectorField] = None
    temporal_index: Optional[int] = None
    domain_fns: List[DomainFunction] = Field(default_factory=list)
    # Directions where derivatives of L are unavailable (e.g. the axis of a cone triple)
    cone_domain: Optional[Callable[[np.ndarray, np.ndarray], bool]] = None
    transition: Optional[ChartTransition] = None
    stationary: Optional[StationaryData] = None
    boundary_sampler: Optional[Callable[[int], np.ndarray]] = None
    max_step: Optional[float] = None
    positive_definite: bool = False

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    def in_box(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x > np.asarray(self.lower)) and np.all(x < np.asarray(self.upper)))

    def in_domain(self, x: np.ndarray) -> bool:
        if not self.in_box(x):
            return False
        return all(fn(np.asarray(x, dtype=float)) > 0.0 for fn in self.domain_fns)

    def domain_margin(self, x: np.ndarray) -> float:
        """Smallest positive distance-like margin to the chart domain edge."""
        x = np.asarray(x, dtype=float)
        lower = np.asarray(self.lower)
        upper = np.asarray(self.upper)
        margins = [float(np.min(np.concatenate([x - lower, upper - x])))]
        margins.extend(float(fn(x)) for fn in self.domain_fns)
        return min(margins)

    def omega(self, x: np.ndarray, v: np.ndarray) -> float:
        if self.orientation is None:
            return 1.0
        return float(np.dot(self.orientation(np.asarray(x, dtype=float)), v))

    def axis(self, x: np.ndarray) -> np.ndarray:
        if self.time_axis is not None:
            return np.asarray(self.time_axis(np.asarray(x, dtype=float)), dtype=float)
        axis = np.zeros(self.dim)
        axis[0] = 1.0
        return axis

    def rigging_at(self, x: np.ndarray) -> np.ndarray:
        """Declared rigging, or the Euclidean gradient of b (always inward for {b >= 0})."""
        if self.rigging is not None:
            return np.asarray(self.rigging(np.asarray(x, dtype=float)), dtype=float)
        if self.boundary is None:
            raise ValueError(f"Model {self.name} has no boundary")
        return scalar_gradient(self.boundary, x)

    def derivatives_available(self, x: np.ndarray, v: np.ndarray) -> bool:
        if self.cone_domain is None:
            return True
        return bool(self.cone_domain(np.asarray(x, dtype=float), np.asarray(v, dtype=float)))

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "dim": self.dim,
            "params": self.params,
            "lower": [x if math.isfinite(x) else str(x) for x in self.lower],
            "upper": [x if math.isfinite(x) else str(x) for x in self.upper],
            "has_boundary": self.boundary is not None,
            "product_form": self.temporal_index is not None,
            "stationary": self.stationary is not None,
            "positive_definite": self.positive_definite,
            "chart_transition": self.transition.name if self.transition else None,
        }


def unbounded(dim: int) -> Tuple[List[float], List[float]]:
    return [-math.inf] * dim, [math.inf] * dim


def conformal_model(model: SpacetimeModel, u: Callable[[torch.Tensor, torch.Tensor], torch.Tensor],
                    name: Optional[str] = None) -> SpacetimeModel:
    """Model with Lagrangian exp(2u) L; u(x, v) must be 0-homogeneous in v."""
    base = model.lagrangian

    def lagrangian(x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
        return torch.exp(2.0 * u(x, v)) * base(x, v)

    return model.model_copy(update={
        "name": name or f"{model.name}_conformal",
        "lagrangian": lagrangian,
        "stationary": None,
    })
