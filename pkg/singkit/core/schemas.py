from typing import Any, Dict, Generic, List, Optional, TypeVar
from pydantic import BaseModel, Field
from datetime import datetime, timezone

T = TypeVar("T")


class ErrorInfo(BaseModel):
    code: str
    message: str
    details: Optional[Dict[str, Any]] = None


class CheckResult(BaseModel):
    check: str
    status: str  # "pass" | "fail" | "skipped" | "reported"
    details: Dict[str, Any] = {}

    @property
    def passed(self) -> bool:
        return self.status != "fail"


class Report(BaseModel, Generic[T]):
    success: bool
    data: Optional[T] = None
    error: Optional[ErrorInfo] = None
    metadata: Dict[str, Any] = {}
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))

    def to_dict(self, include_timestamp: bool = False) -> Dict[str, Any]:
        """Convert to a JSON-ready dict; the timestamp is dropped unless asked for
        so identical runs produce identical bytes."""
        payload = self.model_dump(mode="json")
        if not include_timestamp:
            payload.pop("timestamp", None)
        return payload

    @classmethod
    def ok(cls, data: T, metadata: Optional[Dict[str, Any]] = None) -> "Report[T]":
        return cls(success=True, data=data, metadata=metadata or {})

    @classmethod
    def fail(cls, message: str, code: str = "ERROR", details: Optional[Dict[str, Any]] = None,
             metadata: Optional[Dict[str, Any]] = None) -> "Report[T]":
        return cls(
            success=False,
            error=ErrorInfo(code=code, message=message, details=details),
            metadata=metadata or {},
        )

    @classmethod
    def from_checks(cls, checks: List[CheckResult], metadata: Optional[Dict[str, Any]] = None) -> "Report":
        payload = [c.model_dump(mode="json") for c in checks]
        if all(c.passed for c in checks):
            return cls(success=True, data=payload, metadata=metadata or {})
        failed = [c.check for c in checks if not c.passed]
        return cls(
            success=False,
            data=payload,
            error=ErrorInfo(code="VERIFICATION_FAILED", message=f"{len(failed)} check(s) failed",
                            details={"failed": failed}),
            metadata=metadata or {},
        )
