from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from finsler_cone.schemas.geodesics import GeodesicSolution, InitialData


class CauchySurface(BaseModel):
    """Level set {x^temporal_index = level} of the product-form temporal coordinate."""
    level: float = 0.0


class ChartKind(str, Enum):
    PLUS_INTERIOR = "ell_plus_interior_S"
    PLUS_BOUNDARY = "ell_plus_boundary"
    MINUS_INTERIOR = "ell_minus_interior_S"
    MINUS_BOUNDARY = "ell_minus_boundary"

    @property
    def sign(self) -> int:
        return 1 if self in (ChartKind.PLUS_INTERIOR, ChartKind.PLUS_BOUNDARY) else -1

    @property
    def is_boundary(self) -> bool:
        return self in (ChartKind.PLUS_BOUNDARY, ChartKind.MINUS_BOUNDARY)


class LightspacePoint(BaseModel):
    chart: ChartKind
    point: List[float]
    # future-pointing lightlike representative with Omega(direction) = 1
    direction: List[float]
    # chart coordinates, length 2n - 1
    coordinates: List[float]
    boundary_coordinates: Optional[Dict[str, List[float]]] = None

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.point, dtype=float)

    @property
    def v(self) -> np.ndarray:
        return np.asarray(self.direction, dtype=float)

    @property
    def chart_vector(self) -> np.ndarray:
        """Representative of the chart's class: future for ell^+, past for ell^-."""
        return self.chart.sign * self.v


class GluedClass(BaseModel):
    members: List[Tuple[ChartKind, int]]
    charts: List[ChartKind]


class GluedLightspace(BaseModel):
    classes: List[GluedClass] = Field(default_factory=list)
    # (chart, index) -> class index, keyed "chart:index"
    identification: Dict[str, int] = Field(default_factory=dict)

    def class_of(self, chart: ChartKind, index: int) -> int:
        return self.identification[f"{chart.value}:{index}"]


class ParameterWindow(BaseModel):
    lo: float
    hi: float
    samples: int = 64


class CandidateSpec(BaseModel):
    initial: InitialData
    window: ParameterWindow


class FamilySpec(BaseModel):
    """Initial data of a family indexed by eps_k -> 0."""
    eps: List[float]
    members: List[InitialData]
    both_ways: bool = True


class DistanceEvidence(BaseModel):
    index: int
    eps: float
    d_a: float
    d_b: float


class NonHausdorffCertificate(BaseModel):
    model: str
    threshold: float
    family: List[GeodesicSolution]
    limit_a: GeodesicSolution
    limit_b: GeodesicSolution
    # phase-space samples (x, v / Omega(v)) of the comparison windows
    window_a: List[List[float]]
    window_b: List[List[float]]
    evidence: List[DistanceEvidence]
    # max(d_a, d_b) must not grow along the family by more than this fraction
    decrease_rtol: float = 0.05
    separation: float
    # Omega(v) at the stored samples of each family member and of both limits
    family_gauges: List[List[float]]
    limit_gauges: List[List[float]]


class PairSpec(BaseModel):
    z1: List[float]
    z2: List[float]
    label: Optional[str] = None
    # polyline in the homotopy class to minimize in; None means unrestricted shooting
    guide: Optional[List[List[float]]] = None


class HomotopyMinimizer(BaseModel):
    points: List[List[float]]
    length: float
    vertices: int
    iterations: int
    converged: bool


class FermatProbeResult(BaseModel):
    label: Optional[str] = None
    z1: List[float]
    z2: List[float]
    # None when the budget ran out
    minimizer_found: Optional[bool] = None
    status: str
    best_length: Optional[float] = None
    infimum_estimate: Optional[float] = None
    gap: Optional[float] = None
    connecting_lengths: List[float] = Field(default_factory=list)
    cut_point: bool = False
    best_geodesic: List[List[float]] = Field(default_factory=list)
    message: Optional[str] = None
