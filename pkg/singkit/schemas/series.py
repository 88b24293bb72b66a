from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from singkit.schemas.polynomial import FieldModel, _check_exact
from singkit.services.seriesgen import VARIABLES, TruncatedSeries


class SeriesFile(BaseModel):
    """On-disk series: exact decimal-string coefficients, JSON authoritative."""

    model: str
    n: Optional[int] = None
    k: Optional[int] = None
    j: Optional[int] = None
    var: str = "w"
    field: FieldModel = Field(default_factory=FieldModel)
    order: int
    coeffs: List[str]
    extra: Optional[Dict[str, str]] = None
    config: Optional[Dict[str, Any]] = None

    @field_validator("var")
    @classmethod
    def _known_variable(cls, v: str) -> str:
        if v not in VARIABLES:
            raise ValueError(f"unknown series variable {v!r}")
        return v

    @field_validator("coeffs")
    @classmethod
    def _exact(cls, v: List[str]) -> List[str]:
        return _check_exact(v)

    @model_validator(mode="after")
    def _order_matches(self):
        if self.order != len(self.coeffs):
            raise ValueError(f"order {self.order} does not match {len(self.coeffs)} coefficients")
        return self

    def to_series(self) -> TruncatedSeries:
        return TruncatedSeries.from_json(self.model_dump(exclude={"config"}, exclude_none=False))

    @classmethod
    def from_series(cls, s: TruncatedSeries, config: Optional[Dict[str, Any]] = None) -> "SeriesFile":
        return cls(**s.to_json(), config=config)
