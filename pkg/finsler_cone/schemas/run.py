from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field

OutputFormat = Literal["json", "csv", "jsonl"]


class RunConfig(BaseModel):
    """Everything a CLI run depends on; same config and seed give byte-identical reports."""
    command: str
    model: Optional[str] = None
    tol: Optional[float] = None
    out: Optional[str] = None
    seed: int = 0
    jobs: int = 1
    format: OutputFormat = "json"
    options: Dict[str, Any] = Field(default_factory=dict)


class Criterion(BaseModel):
    name: str
    value: float
    tolerance: float
    passed: bool


class CheckResult(BaseModel):
    name: str
    tags: List[str]
    description: str
    status: Literal["passed", "failed", "error"]
    criteria: List[Criterion] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    message: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == "passed"


class VerificationReport(BaseModel):
    seed: int
    only: Optional[List[str]] = None
    tolerance_override: Optional[float] = None
    checks: List[CheckResult] = Field(default_factory=list)
    passed: bool
    failed: List[str] = Field(default_factory=list)
