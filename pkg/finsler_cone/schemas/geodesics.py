from enum import Enum
from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr


class Termination(str, Enum):
    BOUNDARY_HIT = "boundary_hit"
    DOMAIN_EXIT = "domain_exit"
    CONE_DOMAIN_EXIT = "cone_domain_exit"
    MAX_STEPS = "max_steps"
    PARAMETER_END = "parameter_end"


class Incidence(str, Enum):
    TRANSVERSAL_OUTWARD = "transversal_outward"
    TRANSVERSAL_INWARD = "transversal_inward"
    TANGENTIAL = "tangential"


class TrajectorySample(BaseModel):
    t: float
    x: List[float]
    v: List[float]


class BoundaryHit(BaseModel):
    t: float
    point: List[float]
    velocity: List[float]
    incidence: Incidence
    # db(v_hit) / (|v_hit| |db|)
    normalized_rate: float


class IntegrationOptions(BaseModel):
    """Knobs for a single integration; unset values fall back to the tolerance config."""
    rtol: Optional[float] = None
    atol: Optional[float] = None
    max_steps: Optional[int] = None
    max_step: Optional[float] = None
    # False integrates the ambient extension across {b = 0}
    boundary_events: bool = True
    domain_events: bool = True
    # coordinate norm beyond which a step collapse counts as blow-up
    blowup_norm: float = 1e6

    class Config:
        frozen = True


class InitialData(BaseModel):
    point: List[float]
    velocity: List[float]
    label: Optional[str] = None

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.point, dtype=float)

    @property
    def v(self) -> np.ndarray:
        return np.asarray(self.velocity, dtype=float)


class GeodesicSolution(BaseModel):
    model_name: str
    samples: List[TrajectorySample] = Field(default_factory=list)
    termination: Termination
    boundary_hit: Optional[BoundaryHit] = None
    # set when the solution was also integrated into the past
    past_termination: Optional[Termination] = None
    past_boundary_hit: Optional[BoundaryHit] = None
    lagrangian_initial: float
    lagrangian_drift: float
    # indices of samples that start a new chart piece after a deck transformation
    chart_breaks: List[int] = Field(default_factory=list)
    inextendible: bool = False
    message: Optional[str] = None

    # dense interpolants per accepted step: (t_start, t_end, callable)
    _dense: List[Any] = PrivateAttr(default_factory=list)

    @property
    def params(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def points(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    @property
    def velocities(self) -> np.ndarray:
        return np.array([s.v for s in self.samples])

    @property
    def end(self) -> TrajectorySample:
        return self.samples[-1]

    @property
    def dense(self) -> List[Any]:
        return self._dense

    def attach_dense(self, pieces: List[Any]) -> None:
        self._dense = pieces

    def evaluate(self, params) -> np.ndarray:
        """State [x, v] at the given parameters from the per-step dense output.

        Parameters outside the integrated range raise ValueError. At a chart break
        the continued (mapped) state is returned.
        """
        params = np.atleast_1d(np.asarray(params, dtype=float))
        if not self._dense:
            raise ValueError("Solution carries no dense output")
        dim = len(self.samples[0].x)
        out = np.empty((params.shape[0], 2 * dim))
        for k, s in enumerate(params):
            for lo, hi, interpolant in reversed(self._dense):
                a, b = (lo, hi) if lo <= hi else (hi, lo)
                if a - 1e-14 <= s <= b + 1e-14:
                    out[k] = interpolant(s)
                    break
            else:
                raise ValueError(f"Parameter {s} outside the integrated range")
        return out

    def summary(self) -> dict:
        return {
            "summary": True,
            "model": self.model_name,
            "termination": self.termination.value,
            "samples": len(self.samples),
            "lagrangian_initial": self.lagrangian_initial,
            "lagrangian_drift": self.lagrangian_drift,
            "boundary_hit": self.boundary_hit.model_dump(mode="json") if self.boundary_hit else None,
            "past_termination": self.past_termination.value if self.past_termination else None,
            "chart_breaks": self.chart_breaks,
            "inextendible": self.inextendible,
        }


class ConformalDeviation(BaseModel):
    deviation: float
    scale: float
    compared_length: float
    parameter_discrepancy: float
    certified: bool
    first: GeodesicSolution
    second: GeodesicSolution
