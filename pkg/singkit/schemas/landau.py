from typing import List, Optional

from pydantic import BaseModel, Field

from singkit.schemas.polynomial import PolynomialModel
from singkit.services.numerics import ComplexPoint
from singkit.services.odefit import SingularityEntry, SingularitySet


class SingularityEntryModel(BaseModel):
    factor: PolynomialModel
    multiplicity: int = Field(default=1, ge=1)
    tags: List[str] = Field(default_factory=list)

    def to_entry(self) -> SingularityEntry:
        return SingularityEntry.from_json(self.model_dump())

    @classmethod
    def from_entry(cls, e: SingularityEntry) -> "SingularityEntryModel":
        return cls.model_validate(e.to_json())


def singularity_set_from_models(items: List[SingularityEntryModel]) -> SingularitySet:
    return SingularitySet.build(m.to_entry() for m in items)


class PointRecord(BaseModel):
    """One row of the points CSV."""

    re: float
    im: float
    n: Optional[int] = None
    family: str = ""
    p1: Optional[int] = None
    p2: Optional[int] = None
    k: Optional[int] = None

    @classmethod
    def from_point(cls, pt: ComplexPoint) -> "PointRecord":
        def _int(key: str) -> Optional[int]:
            raw = pt.tag(key)
            return int(raw) if raw not in ("", None) else None

        return cls(re=pt.re, im=pt.im, n=_int("n"), family=pt.tag("family"),
                   p1=_int("p1"), p2=_int("p2"), k=_int("k"))
