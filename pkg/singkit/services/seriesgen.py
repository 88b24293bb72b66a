"""
Series Engines

Exact truncated series for the Ising-class integrals: Phi_H^(n) through the
fully integrated double sum over hypergeometric a(k,p) coefficients, the
one-dimensional Phi_k^(n) through b(k,p) coefficients and the Fourier
integration rule I(p1,p2), the closed forms of Phi_H^(1) and Phi_H^(2), and
the Sorokin integrals I_n.

Every generator is generic over the coefficient field (rationals or GF(p))
and returns a TruncatedSeries tagged with its variable and model metadata.
"""

import logging
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import sympy
from sympy.polys.ring_series import rs_mul, rs_pow
from sympy.polys.rings import ring

from singkit.core.config import settings
from singkit.core.exceptions import FeatureGateError, InvalidInputError
from singkit.core.metrics import MetricsManager
from singkit.services.base import BaseEngine
from singkit.services.exactalg import RATIONALS, Field, Polynomial, residue

logger = logging.getLogger(__name__)

VARIABLES = ("w", "x=w2", "x=16w2", "x")
PREFACTOR_VARIANTS = ("direct", "printed")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesMeta:
    model: str = "anonymous"
    n: Optional[int] = None
    k: Optional[int] = None
    j: Optional[int] = None
    extra: Tuple[Tuple[str, str], ...] = ()

    def with_extra(self, **items: Any) -> "SeriesMeta":
        merged = dict(self.extra)
        merged.update({k: str(v) for k, v in items.items()})
        return SeriesMeta(self.model, self.n, self.k, self.j, tuple(sorted(merged.items())))


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients valid for exponents < order (= len(coeffs))."""

    coeffs: Tuple[Any, ...]
    field: Field = RATIONALS
    variable: str = "w"
    meta: SeriesMeta = dc_field(default_factory=SeriesMeta)

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise InvalidInputError(f"Unknown series variable {self.variable!r}")
        object.__setattr__(self, "coeffs", tuple(self.field.convert(c) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def symbol_name(self) -> str:
        return "w" if self.variable == "w" else "x"

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs[:order], self.field, self.variable, self.meta)

    def over(self, field: Field) -> "TruncatedSeries":
        if field == self.field:
            return self
        if not self.field.is_rational:
            raise InvalidInputError("Only rational series can be reduced to a prime field")
        coeffs = tuple(residue(self.field.to_fraction(c), field.prime) for c in self.coeffs)
        return TruncatedSeries(coeffs, field, self.variable, self.meta)

    def to_polynomial(self) -> Polynomial:
        return Polynomial(self.coeffs, self.field, self.symbol_name)

    def derivative(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(c * i for i, c in enumerate(self.coeffs))[1:],
                               self.field, self.variable, self.meta)

    def evaluate(self, x: float) -> float:
        """Floating evaluation of the truncated sum (rational series only)."""
        acc = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            f = self.field.to_fraction(c)
            acc = acc * x + mpmath.mpf(f.numerator) / f.denominator
        return float(acc)

    def reflect(self) -> "TruncatedSeries":
        """s(-var)."""
        return TruncatedSeries(tuple(-c if i % 2 else c for i, c in enumerate(self.coeffs)),
                               self.field, self.variable, self.meta)

    def to_json(self) -> dict:
        return {
            "model": self.meta.model,
            "n": self.meta.n,
            "k": self.meta.k,
            "j": self.meta.j,
            "var": self.variable,
            "field": self.field.to_json(),
            "order": self.order,
            "coeffs": [self.field.to_str(c) for c in self.coeffs],
            **({"extra": dict(self.meta.extra)} if self.meta.extra else {}),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "TruncatedSeries":
        field = Field.from_json(payload["field"])
        coeffs = tuple(payload["coeffs"])
        if len(coeffs) != int(payload["order"]):
            raise InvalidInputError("Series order does not match the coefficient count",
                                    details={"order": payload["order"], "coeffs": len(coeffs)})
        meta = SeriesMeta(payload.get("model", "anonymous"), payload.get("n"), payload.get("k"),
                          payload.get("j"), tuple(sorted((payload.get("extra") or {}).items())))
        return cls(coeffs, field, payload.get("var", "w"), meta)


@dataclass(frozen=True)
class SorokinSeries:
    """I_n(x) = rational + zeta(2) * zeta2, both exact series in x."""

    n: int
    rational: TruncatedSeries
    zeta2: TruncatedSeries

    @property
    def leading_exponent(self) -> int:
        return self.n + 1

    def evaluate(self, x: float) -> float:
        return self.rational.evaluate(x) + float(mpmath.zeta(2)) * self.zeta2.evaluate(x)


# ---------------------------------------------------------------------------
# Truncated-series helpers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _series_ring(domain):
    R, t = ring("t", domain)
    return R, t


def _to_ring(coeffs: Sequence[Any], field: Field):
    R, _ = _series_ring(field.domain)
    return R.from_dict({(i,): c for i, c in enumerate(coeffs) if c})


def _from_ring(element, length: int, field: Field) -> List[Any]:
    out = [field.zero] * length
    for (i,), c in element.items():
        if i < length:
            out[i] = field.convert(c)
    return out


def truncated_power(coeffs: Sequence[Any], n: int, length: int, field: Field) -> List[Any]:
    """coeffs**n modulo t**length."""
    if length <= 0:
        return []
    _, t = _series_ring(field.domain)
    return _from_ring(rs_pow(_to_ring(coeffs[:length], field), n, t, length), length, field)


def truncated_product(a: Sequence[Any], b: Sequence[Any], length: int, field: Field) -> List[Any]:
    if length <= 0:
        return []
    _, t = _series_ring(field.domain)
    return _from_ring(rs_mul(_to_ring(a[:length], field), _to_ring(b[:length], field), t, length),
                      length, field)


def _spread_even(x_coeffs: Sequence[Any], order: int, field: Field) -> List[Any]:
    """Series in x = w^2 -> series in w of the given order."""
    out = [field.zero] * order
    for i, c in enumerate(x_coeffs):
        if 2 * i < order:
            out[2 * i] = c
    return out


def _binomial(top: int, k: int) -> int:
    if top == -1 and k == 0:
        return 1
    if top < 0 or k < 0:
        return 0
    return math.comb(top, k)


def _hypergeometric_terms(upper: Sequence[Fraction], lower: Sequence[Fraction], scale: Fraction,
                          prefactor: Fraction, length: int, field: Field) -> List[Any]:
    """Terms of prefactor * pFq(upper; lower; scale * t) by the term-ratio recurrence."""
    if length <= 0:
        return []
    terms = [field.convert(prefactor)]
    for j in range(length - 1):
        num = Fraction(scale)
        for a in upper:
            num *= a + j
        if num == 0 or not terms[-1]:
            terms.extend([field.zero] * (length - 1 - j))
            break
        den = Fraction(j + 1)
        for b in lower:
            den *= b + j
        if den == 0:
            raise InvalidInputError("Hypergeometric lower parameter is a nonpositive integer")
        terms.append(terms[-1] * field.convert(num / den))
    return terms


@lru_cache(maxsize=4096)
def _hyp_x(kind: str, k: int, p: int, length: int, field: Field) -> Tuple[Any, ...]:
    m = k + p
    half = Fraction(1, 2)
    if kind == "a":
        upper = ((1 + m) * half, (1 + m) * half, (2 + m) * half, (2 + m) * half)
        prefactor = Fraction(_binomial(m, k))
    else:
        upper = ((1 + m) * half, (1 + m) * half, (2 + m) * half, m * half)
        prefactor = Fraction(_binomial(m - 1, k))
    lower = (Fraction(1 + k), Fraction(1 + p), Fraction(1 + m))
    return tuple(_hypergeometric_terms(upper, lower, Fraction(16), prefactor, length, field))


def _check_indices(k: int, p: int, order: int):
    if k < 0 or p < 0:
        raise InvalidInputError("Hypergeometric indices must be nonnegative", details={"k": k, "p": p})
    if order < 1:
        raise InvalidInputError("Series order must be positive", details={"order": order})


# ---------------------------------------------------------------------------
# Public generators
# ---------------------------------------------------------------------------

def hyp_a(k: int, p: int, order: int, field: Field = RATIONALS) -> TruncatedSeries:
    """a(k,p) = C(m,k) 4F3((1+m)/2,(1+m)/2,(2+m)/2,(2+m)/2; 1+k,1+p,1+m; 16w^2), m = k+p."""
    _check_indices(k, p, order)
    x_terms = _hyp_x("a", k, p, (order + 1) // 2, field)
    return TruncatedSeries(tuple(_spread_even(x_terms, order, field)), field, "w",
                           SeriesMeta("hyp_a", k=k, extra=(("p", str(p)),)))


def hyp_b(k: int, p: int, order: int, field: Field = RATIONALS) -> TruncatedSeries:
    """b(k,p) = C(m-1,k) 4F3((1+m)/2,(1+m)/2,(2+m)/2,m/2; 1+k,1+p,1+m; 16w^2), m = k+p."""
    _check_indices(k, p, order)
    x_terms = _hyp_x("b", k, p, (order + 1) // 2, field)
    return TruncatedSeries(tuple(_spread_even(x_terms, order, field)), field, "w",
                           SeriesMeta("hyp_b", k=k, extra=(("p", str(p)),)))


class SeriesEngine(BaseEngine):
    """Generators that share logging and timing."""

    def phiH_series(self, n: int, order: int, field: Field = RATIONALS) -> TruncatedSeries:
        if n < 1:
            raise InvalidInputError("phiH needs n >= 1", details={"n": n})
        if order < 1:
            raise InvalidInputError("Series order must be positive", details={"order": order})
        if field.prime is not None and field.prime <= n:
            raise InvalidInputError("Field too small for the 1/n! prefactor",
                                    details={"n": n, "p": str(field.prime)})
        with MetricsManager.timed("phiH_series"):
            acc = [field.zero] * order
            s = 0
            pairs = 0
            while n * s < order:
                length = (order - n * s + 1) // 2
                for k in range(0, s // 2 + 1):
                    p = s - k
                    weight = (2 - (k == 0)) * (2 - (p == 0)) * (1 if k == p else 2)
                    powered = truncated_power(_hyp_x("a", k, p, length, field), n, length, field)
                    w_weight = field.convert(weight)
                    for i, c in enumerate(powered):
                        if c:
                            acc[n * s + 2 * i] += w_weight * c
                    pairs += 1
                s += 1
            scale = field.one / field.convert(math.factorial(n))
            coeffs = tuple(c * scale for c in acc)
        self.log_info("Generated phiH series", extra={"n": n, "order": order, "pairs": pairs,
                                                       "field": str(field)})
        return TruncatedSeries(coeffs, field, "w", SeriesMeta("phiH", n=n))

    def phiK_series(self, n: int, k: int, j: int, order: int, field: Field = RATIONALS,
                    variant: Optional[str] = None, allow_cyclotomic: Optional[bool] = None) -> TruncatedSeries:
        variant = variant or settings.phik_prefactor
        allow_cyclotomic = settings.enable_cyclotomic if allow_cyclotomic is None else allow_cyclotomic
        _check_phik(n, k, j, variant)
        if k >= 3 and not allow_cyclotomic:
            raise FeatureGateError("phiK with k >= 3 needs cyclotomic support (enable_cyclotomic)",
                                   details={"n": n, "k": k})
        with MetricsManager.timed("phiK_series"):
            acc = [field.zero] * order
            for p, p1, p2, exponent in _phik_index_triples(n, k, order):
                weight = fourier_weight(n, k, j, p1, p2, variant)
                if weight == 0:
                    continue
                remaining = order - exponent
                length = (remaining + 1) // 2
                b1 = _hyp_x("b", p1, p * (n - k), length, field)
                b2 = _hyp_x("b", p2, p * k, length, field)
                prod = truncated_product(b1, b2, length, field)
                factor = field.convert(weight * (2 - (p1 == 0)) * (2 - (p2 == 0)))
                for i, c in enumerate(prod):
                    if c:
                        acc[exponent + 2 * i] += factor * c
        return TruncatedSeries(tuple(acc), field, "w",
                               SeriesMeta("phiK", n=n, k=k, j=j).with_extra(prefactor=variant))

    def closed_form_series(self, which: str, order: int, field: Field = RATIONALS,
                           params: Optional[Dict[str, Any]] = None) -> TruncatedSeries:
        params = params or {}
        if which == "phiH1":
            four = field.convert(4)
            coeffs, term = [], field.one
            for _ in range(order):
                coeffs.append(term)
                term = term * four
            return TruncatedSeries(tuple(coeffs), field, "w", SeriesMeta("phiH1", n=1))
        if which == "phiH2":
            length = (order + 1) // 2
            gauss = _hypergeometric_terms((Fraction(1, 2), Fraction(-1, 2)), (Fraction(1),),
                                          Fraction(16), Fraction(1), length, field)
            geometric = _hypergeometric_terms((Fraction(1),), (), Fraction(16), Fraction(1), length, field)
            prod = truncated_product(gauss, geometric, length, field)
            half = field.one / field.convert(2)
            return TruncatedSeries(tuple(_spread_even([c * half for c in prod], order, field)),
                                   field, "w", SeriesMeta("phiH2", n=2))
        if which == "gauss2F1":
            a, b, c = (Fraction(str(params[name])) for name in ("a", "b", "c"))
            scale = Fraction(str(params.get("scale", 1)))
            power = int(params.get("power", 1))
            if power not in (1, 2):
                raise InvalidInputError("gauss2F1 argument power must be 1 or 2")
            length = (order + power - 1) // power
            terms = _hypergeometric_terms((a, b), (c,), scale, Fraction(1), length, field)
            coeffs = terms[:order] if power == 1 else _spread_even(terms, order, field)
            return TruncatedSeries(tuple(coeffs), field, "w",
                                   SeriesMeta("gauss2F1").with_extra(a=a, b=b, c=c, scale=scale, power=power))
        raise InvalidInputError(f"Unknown closed form {which!r}")

    def sorokin_series(self, n: int, order: int) -> SorokinSeries:
        """Exact series of I_n(x) (x = 1/z), coefficients split over 1 and zeta(2).

        The inner unit-argument 3F2 is summed in closed form: the summand is a
        rational function of the summation index whose partial fractions give
        harmonic numbers plus a multiple of zeta(2).
        """
        if n < 1:
            raise InvalidInputError("Sorokin integrals need n >= 1", details={"n": n})
        rational = [Fraction(0)] * order
        zeta_part = [Fraction(0)] * order
        for i in range(0, max(order - n - 1, 0)):
            a = n + i
            outer = Fraction(math.comb(n + i, i) * math.factorial(n + i) * math.factorial(n),
                             math.factorial(2 * n + i + 1))
            alpha, beta = _sorokin_inner_sum(n, a)
            rational[n + 1 + i] = outer * alpha
            zeta_part[n + 1 + i] = outer * beta
        meta = SeriesMeta("sorokin", n=n)
        return SorokinSeries(
            n,
            TruncatedSeries(tuple(rational), RATIONALS, "x", meta.with_extra(part="rational")),
            TruncatedSeries(tuple(zeta_part), RATIONALS, "x", meta.with_extra(part="zeta2")),
        )


_engine = SeriesEngine()


def phiH_series(n: int, order: int, field: Field = RATIONALS) -> TruncatedSeries:
    return _engine.phiH_series(n, order, field)


def phiK_series(n: int, k: int, j: int, order: int, field: Field = RATIONALS,
                variant: Optional[str] = None, allow_cyclotomic: Optional[bool] = None) -> TruncatedSeries:
    return _engine.phiK_series(n, k, j, order, field, variant, allow_cyclotomic)


def closed_form_series(which: str, order: int, field: Field = RATIONALS,
                       params: Optional[Dict[str, Any]] = None) -> TruncatedSeries:
    return _engine.closed_form_series(which, order, field, params)


def sorokin_series(n: int, order: int) -> SorokinSeries:
    return _engine.sorokin_series(n, order)


# ---------------------------------------------------------------------------
# Phi_k^(n) building blocks
# ---------------------------------------------------------------------------

def _check_phik(n: int, k: int, j: int, variant: str):
    if not 1 <= k <= n // 2:
        raise InvalidInputError("phiK needs 1 <= k <= n/2", details={"n": n, "k": k})
    if not 0 <= j < k:
        raise InvalidInputError("phiK needs 0 <= j < k", details={"k": k, "j": j})
    if variant not in PREFACTOR_VARIANTS:
        raise InvalidInputError(f"Unknown I(p1,p2) prefactor variant {variant!r}")


def _phik_index_triples(n: int, k: int, order: int):
    """(p, p1, p2, exponent) with exponent = p*n + p1 + p2 < order.

    At p = 0 both powers vanish and only the constant term survives.
    """
    p = 0
    while p * n < order:
        if p == 0:
            yield 0, 0, 0, 0
        else:
            base = p * n
            for p1 in range(0, order - base):
                for p2 in range(0, order - base - p1):
                    yield p, p1, p2, base + p1 + p2
        p += 1


def _cos_two_pi(r: Fraction):
    """cos(2*pi*r) as an exact sympy number."""
    return sympy.cos(2 * sympy.pi * sympy.Rational(r.numerator, r.denominator))


@lru_cache(maxsize=65536)
def fourier_weight(n: int, k: int, j: int, p1: int, p2: int, variant: str = "direct") -> Fraction:
    """Exact I(p1,p2) for the one-dimensional integrals.

    b = (n-k) p2 / k and c = 2 pi j p2 / k. When b = p1 the weight is
    (1 + delta_{p1,0}) cos(c) / 2; otherwise it is F sin(pi b) cos(pi b - c) / pi
    with F = b/(b^2 - p1^2) ("direct") or b^2/(b^2 - p1^2) ("printed").
    """
    b = Fraction((n - k) * p2, k)
    r = Fraction(j * p2, k)
    if b == p1:
        cos_c = _cos_two_pi(r)
        if not cos_c.is_Rational:
            raise FeatureGateError("cos(c) is irrational; exact series unavailable",
                                   details={"n": n, "k": k, "j": j, "p2": p2})
        value = Fraction(1 + (p1 == 0), 2) * Fraction(int(cos_c.p), int(cos_c.q))
        return value
    if b.denominator == 1:
        return Fraction(0)
    # cos(pi b - c) vanishes iff b - 2r is a half-odd integer
    if ((b - 2 * r) - Fraction(1, 2)).denominator == 1:
        return Fraction(0)
    raise FeatureGateError("Fourier weight carries a 1/pi factor; no exact rational series",
                           details={"n": n, "k": k, "j": j, "p1": p1, "p2": p2, "variant": variant})


def fourier_weight_numeric(n: int, k: int, j: int, p1: int, p2: int, variant: str = "direct"):
    b = mpmath.mpf((n - k) * p2) / k
    c = 2 * mpmath.pi * j * p2 / k
    if (n - k) * p2 == k * p1:
        return mpmath.mpf(1 + (p1 == 0)) / 2 * mpmath.cos(c)
    if ((n - k) * p2) % k == 0:
        return mpmath.mpf(0)
    prefactor = b / (b ** 2 - p1 ** 2) if variant == "direct" else b ** 2 / (b ** 2 - p1 ** 2)
    return prefactor * mpmath.sin(mpmath.pi * b) * mpmath.cos(mpmath.pi * b - c) / mpmath.pi


def phiK_numeric(n: int, k: int, j: int, w: float, order: int = 60, variant: str = "direct") -> float:
    """Floating value of the Phi_k^(n) double sum truncated at w-exponent < order.

    Valid for every k (no exactness requirement), so it doubles as the
    reference when the two I(p1,p2) prefactor variants are compared against
    the quadrature oracle.
    """
    _check_phik(n, k, j, variant)
    total = mpmath.mpf(0)
    w = mpmath.mpf(w)
    for p, p1, p2, exponent in _phik_index_triples(n, k, order):
        weight = fourier_weight_numeric(n, k, j, p1, p2, variant)
        if weight == 0:
            continue
        length = (order - exponent + 1) // 2
        b1 = _hyp_x("b", p1, p * (n - k), length, RATIONALS)
        b2 = _hyp_x("b", p2, p * k, length, RATIONALS)
        prod = truncated_product(b1, b2, length, RATIONALS)
        value = mpmath.mpf(0)
        for c in reversed(prod):
            f = RATIONALS.to_fraction(c)
            value = value * w ** 2 + mpmath.mpf(f.numerator) / f.denominator
        total += (2 - (p1 == 0)) * (2 - (p2 == 0)) * w ** exponent * value * weight
    return float(total)


def phiD_affine(s: TruncatedSeries, n: int) -> TruncatedSeries:
    """Phi_1^(n) (constant term 1) -> Phi_D^(n) = -1/n! + (2/n!) Phi_1^(n)."""
    field = s.field
    inv = field.one / field.convert(math.factorial(n))
    coeffs = [c * inv * field.convert(2) for c in s.coeffs]
    if coeffs:
        coeffs[0] = coeffs[0] - inv
    return TruncatedSeries(tuple(coeffs), field, s.variable, SeriesMeta("phiD", n=n))


# ---------------------------------------------------------------------------
# Change of variable
# ---------------------------------------------------------------------------

def change_variable(s: TruncatedSeries, target: str) -> TruncatedSeries:
    """Re-index an even series in w as a series in x = w^2 or x = 16 w^2, or back to w."""
    field = s.field
    if target == s.variable:
        return s
    if target == "w":
        if s.variable not in ("x=w2", "x=16w2"):
            raise InvalidInputError(f"Cannot map variable {s.variable!r} back to w")
        scale = field.one if s.variable == "x=w2" else field.convert(16)
        coeffs, power = [], field.one
        for c in s.coeffs:
            coeffs.append(c * power)
            power = power * scale
        out = _spread_even(coeffs, 2 * len(coeffs) - 1 if coeffs else 0, field)
        return TruncatedSeries(tuple(out), field, "w", s.meta)
    if target not in ("x=w2", "x=16w2") or s.variable != "w":
        raise InvalidInputError(f"Unsupported change of variable {s.variable!r} -> {target!r}")
    odd = [i for i in range(1, s.order, 2) if s.coeffs[i]]
    if odd:
        raise InvalidInputError("Series has nonzero odd coefficients", details={"first_odd": odd[0]})
    inv16 = field.one / field.convert(16) if target == "x=16w2" else field.one
    coeffs, power = [], field.one
    for c in s.coeffs[::2]:
        coeffs.append(c * power)
        power = power * inv16
    return TruncatedSeries(tuple(coeffs), field, target, s.meta)


# ---------------------------------------------------------------------------
# Sorokin inner sum
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _harmonic(m: int, order: int) -> Fraction:
    value = sympy.harmonic(m, order)
    return Fraction(int(value.p), int(value.q))


def _sorokin_inner_sum(n: int, a: int) -> Tuple[Fraction, Fraction]:
    """sum_{k>=0} C(n+k,n) [n! (a+k)! / (a+k+n+1)!]^2 = alpha + beta * zeta(2).

    The summand equals n! prod_{l=1..n}(k+l) / prod_{l=1..n+1}(k+a+l)^2. With
    A_c, B_c the coefficients of 1/(k+c) and 1/(k+c)^2 (c = a+1..a+n+1), and
    sum_c A_c = 0, the sum is -sum A_c H_{c-1} + sum B_c (zeta(2) - H^{(2)}_{c-1}).
    """
    roots = [a + l for l in range(1, n + 2)]
    fact_n = math.factorial(n)
    alpha = Fraction(0)
    beta = Fraction(0)
    for c in roots:
        x = -c
        # g(x) = summand * (x + c)^2
        g = Fraction(fact_n)
        log_derivative = Fraction(0)
        for l in range(1, n + 1):
            g *= x + l
            log_derivative += Fraction(1, x + l)
        for other in roots:
            if other == c:
                continue
            g /= (x + other) ** 2
            log_derivative -= Fraction(2, x + other)
        B = g
        A = g * log_derivative
        alpha -= A * _harmonic(c - 1, 1) + B * _harmonic(c - 1, 2)
        beta += B
    return alpha, beta
