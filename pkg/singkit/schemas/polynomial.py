from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from singkit.services.exactalg import RATIONALS, FactoredPolynomial, Polynomial
from singkit.services.exactalg import Field as CoefficientField


def _check_exact(values: List[str]) -> List[str]:
    for v in values:
        try:
            Fraction(str(v).strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"coefficient {v!r} is not an exact rational") from exc
    return [str(v).strip() for v in values]


class FieldModel(BaseModel):
    type: str = "rational"  # "rational" | "prime"
    p: Optional[str] = None

    @field_validator("type")
    @classmethod
    def _known_type(cls, v: str) -> str:
        if v not in ("rational", "prime"):
            raise ValueError("field type must be 'rational' or 'prime'")
        return v

    def to_field(self) -> CoefficientField:
        return CoefficientField.from_json(self.model_dump(exclude_none=True))


class PolynomialModel(BaseModel):
    var: str = "w"
    coeffs: List[str] = Field(default_factory=list)

    @field_validator("coeffs")
    @classmethod
    def _exact(cls, v: List[str]) -> List[str]:
        return _check_exact(v)

    def to_polynomial(self, field: CoefficientField = RATIONALS) -> Polynomial:
        return Polynomial.from_json(self.model_dump(), field)

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "PolynomialModel":
        return cls(**p.to_json())


class FactoredPolynomialModel(BaseModel):
    unit: str = "1"
    factors: List[Tuple[PolynomialModel, int]] = Field(default_factory=list)

    @field_validator("factors")
    @classmethod
    def _positive_multiplicity(cls, v):
        if any(m < 1 for _, m in v):
            raise ValueError("multiplicities must be positive")
        return v

    def to_factored(self, field: CoefficientField = RATIONALS) -> FactoredPolynomial:
        return FactoredPolynomial.from_json(self.model_dump(), field)

    @classmethod
    def from_factored(cls, f: FactoredPolynomial) -> "FactoredPolynomialModel":
        return cls.model_validate(f.to_json())
