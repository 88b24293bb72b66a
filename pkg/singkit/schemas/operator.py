from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from singkit.schemas.polynomial import FieldModel, PolynomialModel
from singkit.services.odefit import DiffOperator


class OperatorFile(BaseModel):
    var: str = "w"
    order: int
    coeffs: List[PolynomialModel]
    field: FieldModel = Field(default_factory=FieldModel)
    config: Optional[Dict[str, Any]] = None

    @model_validator(mode="after")
    def _order_matches(self):
        if self.order != len(self.coeffs) - 1:
            raise ValueError(f"order {self.order} needs {self.order + 1} coefficients, got {len(self.coeffs)}")
        return self

    def to_operator(self) -> DiffOperator:
        return DiffOperator.from_json(self.model_dump(exclude={"config"}, exclude_none=True))

    @classmethod
    def from_operator(cls, L: DiffOperator, config: Optional[Dict[str, Any]] = None) -> "OperatorFile":
        return cls(**L.to_json(), config=config)
