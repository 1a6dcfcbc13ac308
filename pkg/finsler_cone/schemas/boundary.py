from enum import Enum
from typing import Callable, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

ConvexityKind = Literal["light", "time", "space"]


class Verdict(str, Enum):
    CONVEX = "convex"
    STRICTLY_CONCAVE = "strictly_concave"
    INDETERMINATE = "indeterminate"


class ProbeOutcome(str, Enum):
    STAYS_ON_BOUNDARY = "stays_on_boundary"
    EXITS_MANIFOLD = "exits_manifold"
    ENTERS_INTERIOR = "enters_interior"
    INDETERMINATE = "indeterminate"


class RiggingField(BaseModel):
    """Vector field eta near the boundary; inward means db(eta) > 0."""
    name: str
    field: Callable[[np.ndarray], np.ndarray]

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    def at(self, p) -> np.ndarray:
        return np.asarray(self.field(np.asarray(p, dtype=float)), dtype=float)

    @classmethod
    def constant(cls, vector, name: str = "constant") -> "RiggingField":
        value = np.asarray(vector, dtype=float)
        return cls(name=name, field=lambda p: value)

    def scaled(self, factor: float) -> "RiggingField":
        return RiggingField(name=f"{factor:g}*{self.name}", field=lambda p: factor * self.at(p))

    def shifted(self, tangential: Callable[[np.ndarray], np.ndarray], name: str = "shifted") -> "RiggingField":
        return RiggingField(name=name, field=lambda p: self.at(p) + np.asarray(tangential(p), dtype=float))


class ConvexityEntry(BaseModel):
    point_index: int
    direction_index: int
    point: List[float]
    # normalized to unit auxiliary norm
    direction: List[float]
    ii: Optional[float] = None
    verdict: Verdict
    error: Optional[str] = None


class ConvexitySummary(BaseModel):
    min_ii: Optional[float] = None
    max_abs_ii: Optional[float] = None
    counts: Dict[str, int] = Field(default_factory=dict)
    verdict: Verdict
    totally_geodesic: bool = False


class ConvexityReport(BaseModel):
    model: str
    kind: ConvexityKind
    dead_band: float
    entries: List[ConvexityEntry] = Field(default_factory=list)
    summary: ConvexitySummary


class RiggingInvarianceResult(BaseModel):
    ii1: float
    ii2: float
    # II2 = ratio * II1 with ratio = db(eta1) / db(eta2)
    ratio: float
    relation_error: float
    signs_agree: bool


class ProbeResult(BaseModel):
    outcome: ProbeOutcome
    horizon: float
    decided_at: Optional[float] = None
    b_value: Optional[float] = None
    max_abs_b: Optional[float] = None
    message: Optional[str] = None


class ConsistencyCase(BaseModel):
    seed: int
    kind: str
    ii: Optional[float] = None
    outcome: ProbeOutcome
    expected: Optional[ProbeOutcome] = None
    agrees: Optional[bool] = None
    in_band: bool = False
    skipped: bool = False
    error: Optional[str] = None


class ConsistencyReport(BaseModel):
    cases: List[ConsistencyCase] = Field(default_factory=list)
    considered: int = 0
    agreements: int = 0
    agreement_rate: float = 0.0
    disagreements_outside_band: List[int] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.agreement_rate >= 0.99 and not self.disagreements_outside_band
