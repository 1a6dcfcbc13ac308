from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class ExpectedValue(BaseModel):
    name: str
    value: float
    tolerance: float
    # closed form, derivation oracle, or equation the value comes from
    provenance: str


class ModelCatalogEntry(BaseModel):
    name: str
    description: str
    params: Dict[str, Any] = Field(default_factory=dict)
    expected_values: List[ExpectedValue] = Field(default_factory=list)

    def expected(self, name: str) -> ExpectedValue:
        for value in self.expected_values:
            if value.name == name:
                return value
        raise KeyError(f"{self.name} has no expected value {name}")


class ModelDefinition(BaseModel):
    """Model definition file: {name, dim, params, builtin | expression}."""
    name: str
    dim: Optional[int] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    builtin: Optional[str] = None
    expression: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "ModelDefinition":
        if (self.builtin is None) == (self.expression is None):
            raise ValueError("exactly one of 'builtin' or 'expression' is required")
        return self
