"""
Sorokin integrals

The order-four operator annihilating the triple integral I_n(x), and the
end-to-end check that it kills both the rational part and the zeta(2) part
of the exact series from seriesgen.
"""

from dataclasses import dataclass
from typing import List, Optional

from singkit.core.exceptions import InvalidInputError, VerificationError
from singkit.core.metrics import MetricsManager
from singkit.core.schemas import CheckResult
from singkit.services.base import BaseEngine
from singkit.services.exactalg import RATIONALS, Polynomial
from singkit.services.odefit import DiffOperator, apply_operator, indicial_polynomial
from singkit.services.seriesgen import TruncatedSeries, sorokin_series

MIN_TERMS = 20


def sorokin_operator(n: int) -> DiffOperator:
    """L_n with denominators cleared to the common head (x-1)^2 x^4."""
    if n < 1:
        raise InvalidInputError("Sorokin operators need n >= 1", details={"n": n})
    q = n * (n + 1)
    x = "x"
    a4 = Polynomial.parse("(x-1)**2*x**4", var=x)
    a3 = Polynomial.parse("2*(3*x-1)*(x-1)*x**3", var=x)
    a2 = Polynomial.parse(f"(7*x**2 + ({n * n + n - 5})*x - {2 * q})*x**2", var=x)
    a1 = Polynomial.parse(f"(x**2 + {2 * q})*x", var=x)
    a0 = Polynomial.parse(f"{q}*(({n * n + n + 1})*x + ({(n - 1) * (n + 2)}))", var=x)
    return DiffOperator((a0, a1, a2, a3, a4), RATIONALS, "x")


def _shifted(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries((s.field.zero,) + tuple(s.coeffs[:-1]), s.field, s.variable,
                           s.meta.with_extra(shifted="true"))


def _last_nonzero(residual: TruncatedSeries) -> Optional[int]:
    nonzero = [i for i, c in enumerate(residual.coeffs) if c]
    return nonzero[-1] if nonzero else None


def _first_nonzero(residual: TruncatedSeries) -> Optional[int]:
    return next((i for i, c in enumerate(residual.coeffs) if c), None)


@dataclass(frozen=True)
class SorokinVerification:
    n: int
    terms: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class SorokinEngine(BaseEngine):

    def verify(self, n: int, terms: int, control: bool = True) -> SorokinVerification:
        if terms < MIN_TERMS:
            raise InvalidInputError(f"Annihilation checks need at least {MIN_TERMS} terms",
                                    details={"terms": terms})
        L = sorokin_operator(n)
        checks = []
        with MetricsManager.timed("sorokin_verify"):
            series = sorokin_series(n, terms)
            for part, s in (("rational", series.rational), ("zeta2", series.zeta2)):
                residual = apply_operator(L, s)
                offending = _first_nonzero(residual)
                checks.append(CheckResult(
                    check=f"annihilate:{part}",
                    status="pass" if offending is None else "fail",
                    details={"n": n, "terms": terms, "residual_length": residual.order,
                             "first_nonzero": offending, "max_nonzero": _last_nonzero(residual)},
                ))
            if control:
                residual = apply_operator(L, _shifted(series.rational))
                offending = _first_nonzero(residual)
                checks.append(CheckResult(
                    check="control:shifted",
                    status="fail" if offending is None else "pass",
                    details={"first_nonzero": offending},
                ))
            for label, point in (("0", "x"), ("1", "1-x")):
                rho = indicial_polynomial(L, Polynomial.parse(point, var="x"))
                checks.append(CheckResult(check=f"indicial:{label}", status="reported",
                                          details={"polynomial": str(rho)}))
        result = SorokinVerification(n, terms, checks)
        if result.passed:
            self.log_info("Sorokin operator annihilates the series", extra={"n": n, "terms": terms})
        else:
            self.log_warning("Sorokin annihilation failed", extra={"n": n, "terms": terms})
        return result


_engine = SorokinEngine()


def sorokin_verify(n: int, terms: int, control: bool = True) -> SorokinVerification:
    return _engine.verify(n, terms, control)


def assert_annihilates(n: int, terms: int):
    result = sorokin_verify(n, terms, control=False)
    if not result.passed:
        failed = {c.check: c.details for c in result.checks if not c.passed}
        raise VerificationError("Sorokin operator leaves a nonzero residual", details=failed)
