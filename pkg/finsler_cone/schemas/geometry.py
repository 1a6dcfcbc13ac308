from enum import Enum
from typing import List

import numpy as np
from pydantic import BaseModel, Field

from finsler_cone.core.config import settings


class CausalClass(str, Enum):
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    SPACELIKE = "spacelike"
    OUTSIDE_DOMAIN = "outside_domain"


class ToleranceConfig(BaseModel):
    """Tolerances threaded through every operation of a run."""
    classification: float = 1e-10
    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12
    dead_band: float = 1e-7
    degeneracy_floor: float = 1e-12
    event_tol: float = 1e-12
    max_steps: int = 20000
    bracket_max: float = 1e6

    class Config:
        frozen = True

    @classmethod
    def from_settings(cls) -> "ToleranceConfig":
        return cls(
            classification=settings.CLASSIFICATION_TOL,
            ode_rtol=settings.ODE_RTOL,
            ode_atol=settings.ODE_ATOL,
            dead_band=settings.DEAD_BAND,
            degeneracy_floor=settings.DEGENERACY_FLOOR,
            event_tol=settings.EVENT_TOL,
            max_steps=settings.MAX_STEPS,
            bracket_max=settings.BRACKET_MAX,
        )

    def overridden(self, tol: float) -> "ToleranceConfig":
        """Copy with the classification and verdict tolerances replaced."""
        return self.model_copy(update={"classification": tol, "dead_band": tol})


class TangentSample(BaseModel):
    point: List[float]
    vector: List[float]
    causal_class: CausalClass
    tolerance: float = 1e-10

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.point, dtype=float)

    @property
    def v(self) -> np.ndarray:
        return np.asarray(self.vector, dtype=float)


class FundamentalTensorValue(BaseModel):
    base: TangentSample
    matrix: List[List[float]]
    determinant: float

    def as_array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=float)


class ChristoffelValue(BaseModel):
    base: TangentSample
    # gamma[k][i][j] = Gamma^k_ij
    gamma: List[List[List[float]]] = Field(default_factory=list)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)


class SprayValue(BaseModel):
    base: TangentSample
    coeffs: List[float]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)
