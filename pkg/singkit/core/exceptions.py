from typing import Any, Dict, Optional

# CLI exit codes
EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_BAD_INPUT = 2
EXIT_LIMIT = 3


class SingkitError(Exception):
    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_MISMATCH,
        error_code: str = "SINGKIT_ERROR",
        details: Optional[Dict[str, Any]] = None,
    ):
        self.message = message
        self.exit_code = exit_code
        self.error_code = error_code
        self.details = details
        super().__init__(self.message)


class InvalidInputError(SingkitError):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_BAD_INPUT, error_code="INVALID_INPUT", details=details)


class DomainMismatchError(SingkitError):
    def __init__(self, message: str = "Operands live over different coefficient domains",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_BAD_INPUT, error_code="DOMAIN_MISMATCH", details=details)


class FeatureGateError(SingkitError):
    """Raised when a computation needs a capability that is switched off."""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_BAD_INPUT, error_code="FEATURE_GATED", details=details)


class NotSingularError(SingkitError):
    def __init__(self, message: str = "Point is not a singular point of the operator",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_BAD_INPUT, error_code="NOT_SINGULAR", details=details)


class DegeneracyError(SingkitError):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_MISMATCH, error_code="DEGENERATE", details=details)


class VerificationError(SingkitError):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_MISMATCH, error_code="VERIFICATION_FAILED", details=details)


class InsufficientTermsError(SingkitError):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_LIMIT, error_code="INSUFFICIENT_TERMS", details=details)


class LiftFailureError(SingkitError):
    def __init__(self, message: str = "Rational reconstruction failed after exhausting the prime pool",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_LIMIT, error_code="LIFT_FAILED", details=details)


class DegreeCapError(SingkitError):
    def __init__(self, degree: int, cap: int):
        super().__init__(
            f"Polynomial degree {degree} exceeds the factorization cap {cap}",
            exit_code=EXIT_LIMIT,
            error_code="DEGREE_CAP",
            details={"degree": degree, "cap": cap},
        )


class ConvergenceError(SingkitError):
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, exit_code=EXIT_LIMIT, error_code="NO_CONVERGENCE", details=details)


class UnluckyPrimeError(SingkitError):
    """A prime divides a denominator or leading coefficient; the caller switches primes."""
    def __init__(self, prime: int, reason: str = "denominator vanishes"):
        super().__init__(
            f"Prime {prime} is unlucky: {reason}",
            exit_code=EXIT_LIMIT,
            error_code="UNLUCKY_PRIME",
            details={"prime": str(prime), "reason": reason},
        )
        self.prime = prime
