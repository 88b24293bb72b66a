"""
Exact Arithmetic Kernel

Coefficient fields, dense univariate and bivariate polynomials, and the
multi-modular machinery (nullspace mod p, CRT, rational reconstruction)
shared by every engine in the package.

Architecture:
- Field: the coefficient domain, either the rationals or GF(p). Elements are
  sympy domain elements; heavy operations (gcd, resultant, factorization,
  row reduction) are delegated to sympy's polys module.
- Polynomial: immutable, coefficients low -> high, with a primitive normal
  form (integer-cleared, content 1, lowest nonzero coefficient positive).
- QuotientRing: arithmetic in QQ[w]/(f) for an irreducible f; this is the
  verification primitive used by landau, modular and odefit.
- Prime pool: the 50 largest primes below 2^61, consumed in order.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import sympy
from sympy import GF, QQ, Poly, Symbol, isprime, prevprime
from sympy.ntheory.modular import crt
from sympy.polys import polyconfig
from sympy.polys.densearith import dup_add, dup_mul, dup_neg, dup_pow, dup_rem, dup_sub
from sympy.polys.matrices import DomainMatrix
from sympy.polys.polyerrors import NotInvertible
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from singkit.core.config import settings
from singkit.core.exceptions import (
    DegeneracyError,
    DegreeCapError,
    DomainMismatchError,
    InvalidInputError,
    LiftFailureError,
    UnluckyPrimeError,
    VerificationError,
)
from singkit.core.metrics import MetricsManager

logger = logging.getLogger(__name__)

T = TypeVar("T")

NEG_INF_DEGREE = float("-inf")
POOL_SIZE = 50
POOL_CEILING = 2 ** 61


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _prime_domain(p: int):
    if p < 2 or not isprime(p):
        raise InvalidInputError(f"Field characteristic {p} is not prime", details={"p": str(p)})
    return GF(p)


@dataclass(frozen=True)
class Field:
    """The rationals when ``prime`` is None, otherwise GF(prime)."""

    prime: Optional[int] = None

    def __post_init__(self):
        if self.prime is not None:
            _prime_domain(int(self.prime))

    @classmethod
    def rational(cls) -> "Field":
        return cls()

    @classmethod
    def mod(cls, p: int) -> "Field":
        return cls(int(p))

    @property
    def is_rational(self) -> bool:
        return self.prime is None

    @property
    def domain(self):
        return QQ if self.prime is None else _prime_domain(self.prime)

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def convert(self, value: Any):
        """Bring ints, Fractions, decimal strings, sympy numbers or domain elements into the field."""
        K = self.domain
        if K.of_type(value):
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, sympy.Basic):
            if not value.is_Rational:
                raise InvalidInputError(f"Non-rational coefficient {value}")
            value = Fraction(int(value.p), int(value.q))
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return K(value)
        if isinstance(value, Fraction):
            num, den = value.numerator, value.denominator
        elif hasattr(value, "numerator") and hasattr(value, "denominator"):
            num, den = int(value.numerator), int(value.denominator)
        else:
            raise InvalidInputError(f"Cannot interpret {value!r} as an exact scalar")
        if self.prime is None:
            return QQ(num, den)
        return K(residue(Fraction(num, den), self.prime))

    def to_fraction(self, value: Any) -> Fraction:
        if self.prime is not None:
            raise DomainMismatchError("Prime-field residues have no rational value")
        value = self.convert(value)
        return Fraction(int(value.numerator), int(value.denominator))

    def to_int(self, value: Any) -> int:
        """Canonical residue in [0, p) (prime fields) or the integer value (rationals)."""
        value = self.convert(value)
        if self.prime is None:
            if int(value.denominator) != 1:
                raise InvalidInputError(f"{value} is not an integer")
            return int(value.numerator)
        return int(value) % self.prime

    def to_str(self, value: Any) -> str:
        value = self.convert(value)
        if self.prime is not None:
            return str(int(value) % self.prime)
        num, den = int(value.numerator), int(value.denominator)
        return str(num) if den == 1 else f"{num}/{den}"

    def to_json(self) -> dict:
        if self.prime is None:
            return {"type": "rational"}
        return {"type": "prime", "p": str(self.prime)}

    @classmethod
    def from_json(cls, payload: dict) -> "Field":
        if payload.get("type") == "rational":
            return cls()
        if payload.get("type") == "prime":
            return cls(int(payload["p"]))
        raise InvalidInputError("Unknown field description", details={"field": payload})

    def __str__(self) -> str:
        return "QQ" if self.prime is None else f"GF({self.prime})"


RATIONALS = Field()


def residue(value: Fraction, p: int) -> int:
    """Image of a rational in GF(p); a vanishing denominator makes the prime unlucky."""
    value = Fraction(value)
    den = value.denominator % p
    if den == 0:
        raise UnluckyPrimeError(p, f"denominator of {value} vanishes")
    return value.numerator % p * pow(den, -1, p) % p


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    coeffs: Tuple[Any, ...]
    field: Field = RATIONALS
    var: str = "w"

    def __post_init__(self):
        converted = [self.field.convert(c) for c in self.coeffs]
        while converted and not converted[-1]:
            converted.pop()
        object.__setattr__(self, "coeffs", tuple(converted))

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, field: Field = RATIONALS, var: str = "w") -> "Polynomial":
        return cls((), field, var)

    @classmethod
    def constant(cls, value: Any, field: Field = RATIONALS, var: str = "w") -> "Polynomial":
        return cls((value,), field, var)

    @classmethod
    def monomial(cls, degree: int, field: Field = RATIONALS, var: str = "w", coeff: Any = 1) -> "Polynomial":
        return cls((0,) * degree + (coeff,), field, var)

    @classmethod
    def from_sympy(cls, poly: Poly, field: Field = RATIONALS, var: Optional[str] = None) -> "Polynomial":
        if len(poly.gens) != 1:
            raise InvalidInputError("Expected a univariate sympy Poly", details={"gens": str(poly.gens)})
        coeffs = [field.convert(int(c) if field.prime is not None else c) for c in reversed(poly.all_coeffs())]
        return cls(tuple(coeffs), field, var or str(poly.gens[0]))

    @classmethod
    def parse(cls, text: str, var: str = "w", field: Field = RATIONALS) -> "Polynomial":
        """Parse an expression such as ``"1+3*w+4*w**2"`` or ``"(1-w)**2*(1-4*w)"``."""
        symbol = Symbol(var)
        expr = sympy.sympify(text, locals={var: symbol})
        return cls.from_sympy(Poly(expr, symbol, domain=QQ), RATIONALS, var).over(field)

    # -- views --------------------------------------------------------------

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.var)

    def to_sympy(self) -> Poly:
        return Poly(list(reversed(self.coeffs)) or [0], self.symbol, domain=self.field.domain)

    def to_expr(self) -> sympy.Expr:
        if self.field.prime is not None:
            raise DomainMismatchError("Only rational polynomials convert to expressions")
        return self.over(RATIONALS).to_sympy().as_expr()

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF_DEGREE

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int:
        """Exponent of the lowest nonzero term."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise InvalidInputError("The zero polynomial has no valuation")

    @property
    def leading_coeff(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    @property
    def lowest_coeff(self):
        return self.coeffs[self.valuation]

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def key(self) -> Tuple[str, ...]:
        """Deduplication key: exact decimal strings of the coefficients."""
        return tuple(self.field.to_str(c) for c in self.coeffs)

    def _dup(self) -> list:
        return list(reversed(self.coeffs))

    def _wrap(self, dup: list) -> "Polynomial":
        return Polynomial(tuple(reversed(dup)), self.field, self.var)

    def _check(self, other: "Polynomial"):
        if self.field != other.field:
            raise DomainMismatchError(details={"left": str(self.field), "right": str(other.field)})
        if self.var != other.var:
            raise DomainMismatchError("Polynomials use different variables",
                                      details={"left": self.var, "right": other.var})

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return self._wrap(dup_add(self._dup(), other._dup(), self.field.domain))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return self._wrap(dup_sub(self._dup(), other._dup(), self.field.domain))

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        return self._wrap(dup_mul(self._dup(), other._dup(), self.field.domain))

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return self._wrap(dup_neg(self._dup(), self.field.domain))

    def __pow__(self, exponent: int) -> "Polynomial":
        return self._wrap(dup_pow(self._dup(), int(exponent), self.field.domain))

    def scale(self, factor: Any) -> "Polynomial":
        factor = self.field.convert(factor)
        return Polynomial(tuple(c * factor for c in self.coeffs), self.field, self.var)

    def shift(self, k: int) -> "Polynomial":
        """Multiply by var**k."""
        if self.is_zero:
            return self
        return Polynomial((self.field.zero,) * k + self.coeffs, self.field, self.var)

    def rem(self, modulus: "Polynomial") -> "Polynomial":
        self._check(modulus)
        if modulus.is_zero:
            raise InvalidInputError("Division by the zero polynomial")
        return self._wrap(dup_rem(self._dup(), modulus._dup(), self.field.domain))

    def divmod(self, other: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        self._check(other)
        q, r = self.to_sympy().div(other.to_sympy())
        return Polynomial.from_sympy(q, self.field, self.var), Polynomial.from_sympy(r, self.field, self.var)

    def exquo(self, other: "Polynomial") -> "Polynomial":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise InvalidInputError("Inexact polynomial division")
        return q

    def divides(self, other: "Polynomial") -> bool:
        return other.rem(self).is_zero

    def derivative(self, times: int = 1) -> "Polynomial":
        coeffs = list(self.coeffs)
        for _ in range(times):
            coeffs = [c * i for i, c in enumerate(coeffs)][1:]
        return Polynomial(tuple(coeffs), self.field, self.var)

    def evaluate(self, x: Any):
        """Horner evaluation at an element of the field (or any ring accepting field scalars)."""
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def substitute_scaled(self, factor: Any) -> "Polynomial":
        """p(factor * var)."""
        factor = self.field.convert(factor)
        power = self.field.one
        out = []
        for c in self.coeffs:
            out.append(c * power)
            power = power * factor
        return Polynomial(tuple(out), self.field, self.var)

    def reflect(self) -> "Polynomial":
        """p(-var)."""
        return self.substitute_scaled(-1)

    def reversed_poly(self) -> "Polynomial":
        """var**deg * p(1/var)."""
        return Polynomial(tuple(reversed(self.coeffs)), self.field, self.var)

    def rename(self, var: str) -> "Polynomial":
        return Polynomial(self.coeffs, self.field, var)

    def over(self, field: Field) -> "Polynomial":
        """Change of coefficient field (rationals -> GF(p) reduction, or re-tagging)."""
        if field == self.field:
            return self
        if self.field.prime is None and field.prime is not None:
            return Polynomial(tuple(residue(self.field.to_fraction(c), field.prime) for c in self.coeffs),
                              field, self.var)
        if self.field.prime is not None and field.prime is None:
            raise DomainMismatchError("Use lift_to_rationals to leave a prime field")
        raise DomainMismatchError(details={"from": str(self.field), "to": str(field)})

    # -- normal form ------------------------------------------------------------

    def normalized(self) -> "Polynomial":
        """Primitive normal form: integer-cleared, content 1, lowest nonzero coefficient positive.

        Over GF(p) the lowest nonzero coefficient is scaled to 1.
        """
        if self.is_zero:
            return self
        if self.field.prime is not None:
            inv = self.field.one / self.lowest_coeff
            return self.scale(inv)
        fracs = [self.field.to_fraction(c) for c in self.coeffs]
        den = math.lcm(*(f.denominator for f in fracs))
        ints = [int(f * den) for f in fracs]
        content = math.gcd(*ints)
        sign = 1 if next(i for i in ints if i) > 0 else -1
        return Polynomial(tuple(sign * i // content for i in ints), self.field, self.var)

    def normalization_factor(self):
        """The scalar c with self * c == self.normalized()."""
        return self.normalized().lowest_coeff / self.lowest_coeff

    def integer_coeffs(self) -> List[int]:
        return [self.field.to_int(c) for c in self.normalized().coeffs]

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {"var": self.var, "coeffs": [self.field.to_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, payload: dict, field: Field = RATIONALS) -> "Polynomial":
        return cls(tuple(payload["coeffs"]), field, payload.get("var", "w"))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            text = self.field.to_str(c)
            if i == 0:
                terms.append(text)
                continue
            mono = self.var if i == 1 else f"{self.var}^{i}"
            if text == "1":
                terms.append(mono)
            elif text == "-1":
                terms.append(f"-{mono}")
            else:
                terms.append(f"{text}*{mono}")
        return "+".join(terms).replace("+-", "-")


# ---------------------------------------------------------------------------
# Factored polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactoredPolynomial:
    unit: Any
    factors: Tuple[Tuple[Polynomial, int], ...]
    field: Field = RATIONALS
    var: str = "w"

    def expand(self) -> Polynomial:
        result = Polynomial.constant(self.unit, self.field, self.var)
        for factor, mult in self.factors:
            result = result * factor ** mult
        return result

    def squarefree(self) -> Polynomial:
        result = Polynomial.constant(1, self.field, self.var)
        for factor, _ in self.factors:
            result = result * factor
        return result

    def keys(self) -> List[Tuple[str, ...]]:
        return [f.key() for f, _ in self.factors]

    def multiplicity(self, factor: Polynomial) -> int:
        key = factor.normalized().key()
        for f, m in self.factors:
            if f.key() == key:
                return m
        return 0

    def to_json(self) -> dict:
        return {
            "unit": self.field.to_str(self.unit),
            "factors": [[f.to_json(), m] for f, m in self.factors],
        }

    @classmethod
    def from_json(cls, payload: dict, field: Field = RATIONALS) -> "FactoredPolynomial":
        factors = tuple((Polynomial.from_json(f, field), int(m)) for f, m in payload["factors"])
        var = factors[0][0].var if factors else "w"
        return cls(field.convert(payload["unit"]), factors, field, var)

    def __str__(self) -> str:
        parts = [] if self.field.to_str(self.unit) == "1" else [self.field.to_str(self.unit)]
        for f, m in self.factors:
            parts.append(f"({f})" + (f"^{m}" if m > 1 else ""))
        return "*".join(parts) or "1"


def _factor_sort_key(item: Tuple[Polynomial, int]):
    poly, _ = item
    return (poly.degree, [len(s) for s in poly.key()], poly.key())


# ---------------------------------------------------------------------------
# Univariate operations
# ---------------------------------------------------------------------------

def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """gcd in primitive normal form; divides both inputs exactly."""
    a._check(b)
    if a.is_zero and b.is_zero:
        raise InvalidInputError("gcd(0, 0) is undefined")
    if a.is_zero:
        return b.normalized()
    if b.is_zero:
        return a.normalized()
    g = a.to_sympy().gcd(b.to_sympy())
    return Polynomial.from_sympy(g, a.field, a.var).normalized()


def squarefree_part(p: Polynomial) -> Polynomial:
    if p.is_zero:
        raise InvalidInputError("squarefree part of the zero polynomial")
    return Polynomial.from_sympy(p.to_sympy().sqf_part(), p.field, p.var).normalized()


def factor_poly(p: Polynomial, field: Optional[Field] = None) -> FactoredPolynomial:
    """Complete irreducible factorization over the declared field.

    sympy runs Zassenhaus over QQ (squarefree split, factorization mod a good
    prime, Hensel lifting, recombination) and Cantor-Zassenhaus over GF(p).
    Factors come back in primitive normal form with the unit adjusted so the
    product reproduces the input.
    """
    if field is not None:
        p = p.over(field)
    if p.is_zero:
        raise InvalidInputError("Cannot factor the zero polynomial")
    cap = settings.arithmetic.factor_degree_cap
    # the cap applies to the squarefree core
    if p.degree > cap:
        core = squarefree_part(p)
        if core.degree > cap:
            raise DegreeCapError(core.degree, cap)

    MetricsManager.record_factorization(str(p.field))
    coeff, raw = p.to_sympy().factor_list()
    unit = p.field.convert(int(coeff) if p.field.prime is not None else coeff)
    factors = []
    for fpoly, mult in raw:
        f = Polynomial.from_sympy(fpoly, p.field, p.var)
        lam = f.normalization_factor()
        unit = unit / lam ** mult
        factors.append((f.normalized(), int(mult)))
    factors.sort(key=_factor_sort_key)
    result = FactoredPolynomial(unit, tuple(factors), p.field, p.var)

    if settings.arithmetic.check_factorizations and result.expand() != p:
        raise VerificationError("Factorization does not reproduce its input", details={"poly": str(p)})
    return result


def factor_set_product(polys: Iterable[Polynomial]) -> Polynomial:
    """Product of the distinct irreducible factors of all inputs."""
    seen = {}
    var, field = "w", RATIONALS
    for poly in polys:
        var, field = poly.var, poly.field
        if poly.degree <= 0:
            continue
        for f, _ in factor_poly(poly).factors:
            seen.setdefault(f.key(), f)
    result = Polynomial.constant(1, field, var)
    for key in sorted(seen):
        result = result * seen[key]
    return result.normalized()


# ---------------------------------------------------------------------------
# Bivariate polynomials and resultants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BivariatePolynomial:
    """Polynomial in ``outer`` whose coefficients are Polynomials in ``inner``."""

    coeffs: Tuple[Polynomial, ...]
    outer: str = "z"
    inner: str = "w"
    field: Field = RATIONALS

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_sympy(cls, poly: Poly, field: Field = RATIONALS) -> "BivariatePolynomial":
        outer, inner = (str(g) for g in poly.gens)
        degree = poly.degree(poly.gens[0])
        buckets = [dict() for _ in range(max(degree, 0) + 1)]
        for (i, j), c in poly.terms():
            buckets[i][j] = c
        coeffs = []
        for bucket in buckets:
            top = max(bucket) if bucket else -1
            coeffs.append(Polynomial(tuple(bucket.get(j, 0) for j in range(top + 1)), field, inner))
        return cls(tuple(coeffs), outer, inner, field)

    def to_sympy(self) -> Poly:
        terms = {}
        for i, c in enumerate(self.coeffs):
            for j, v in enumerate(c.coeffs):
                if v:
                    terms[(i, j)] = v
        return Poly.from_dict(terms or {(0, 0): 0}, Symbol(self.outer), Symbol(self.inner),
                              domain=self.field.domain)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF_DEGREE

    def content(self) -> Polynomial:
        content = Polynomial.zero(self.field, self.inner)
        for c in self.coeffs:
            content = poly_gcd(content, c) if not (content.is_zero and c.is_zero) else content
        return content

    def split_content(self) -> Tuple[Polynomial, "BivariatePolynomial"]:
        """(z-content, primitive part); the content is a polynomial in the inner variable."""
        if self.is_zero:
            raise InvalidInputError("Zero bivariate polynomial has no content")
        content = self.content()
        return content, BivariatePolynomial(tuple(c.exquo(content) for c in self.coeffs),
                                            self.outer, self.inner, self.field)

    def to_json(self) -> dict:
        return {"outer": self.outer, "inner": self.inner,
                "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, payload: dict, field: Field = RATIONALS) -> "BivariatePolynomial":
        inner = payload.get("inner", "w")
        coeffs = tuple(Polynomial.from_json(c, field).rename(inner) for c in payload["coeffs"])
        return cls(coeffs, payload.get("outer", "z"), inner, field)

    def reduce_in(self, ring: "QuotientRing") -> List[Polynomial]:
        """Coefficients in the outer variable reduced into QQ[inner]/(f)."""
        return _strip_k([ring.reduce(c) for c in self.coeffs])


def poly_resultant(a: BivariatePolynomial, b: BivariatePolynomial) -> Polynomial:
    """Sylvester resultant with respect to the outer variable.

    Inputs are taken as given: callers remove z-contents first with
    ``split_content`` and track them separately.
    """
    if a.is_zero or b.is_zero:
        raise InvalidInputError("Resultant with the zero polynomial")
    if a.field != b.field or a.inner != b.inner:
        raise DomainMismatchError()
    method = settings.arithmetic.resultant_method
    MetricsManager.record_resultant(method)
    pa, pb = a.to_sympy(), b.to_sympy()
    with polyconfig.using(USE_COLLINS_RESULTANT=(method == "collins")):
        res = pa.resultant(pb)
    if isinstance(res, Poly):
        if res.is_zero:
            return Polynomial.zero(a.field, a.inner)
        return Polynomial.from_sympy(Poly(res.as_expr(), Symbol(a.inner), domain=a.field.domain),
                                     a.field, a.inner)
    return Polynomial.constant(res, a.field, a.inner)


# ---------------------------------------------------------------------------
# Quotient ring QQ[w]/(f)
# ---------------------------------------------------------------------------

def _strip_k(items: List[Polynomial]) -> List[Polynomial]:
    while items and items[-1].is_zero:
        items.pop()
    return items


class QuotientRing:
    """Exact arithmetic in QQ[w]/(f) for an irreducible f of positive degree."""

    def __init__(self, modulus: Polynomial):
        if modulus.degree < 1:
            raise InvalidInputError("Quotient ring modulus must have positive degree")
        self.modulus = modulus.normalized()
        self._sym_mod = self.modulus.to_sympy()

    @property
    def degree(self) -> int:
        return self.modulus.degree

    def reduce(self, p: Polynomial) -> Polynomial:
        return p.rem(self.modulus)

    def mul(self, a: Polynomial, b: Polynomial) -> Polynomial:
        return (a * b).rem(self.modulus)

    def inverse(self, a: Polynomial) -> Polynomial:
        a = self.reduce(a)
        if a.is_zero:
            raise DegeneracyError("Division by zero in the quotient ring",
                                  details={"modulus": str(self.modulus)})
        try:
            inv = a.to_sympy().invert(self._sym_mod)
        except NotInvertible as exc:
            raise DegeneracyError("Element is not invertible; modulus is reducible",
                                  details={"modulus": str(self.modulus)}) from exc
        return Polynomial.from_sympy(inv, a.field, a.var)

    def fraction(self, num: Polynomial, den: Polynomial) -> Polynomial:
        return self.mul(num, self.inverse(den))

    def as_rational(self, a: Polynomial) -> Optional[Fraction]:
        """The rational value of a reduced element, or None when it is irrational."""
        a = self.reduce(a)
        if a.is_zero:
            return Fraction(0)
        if a.degree == 0:
            return a.field.to_fraction(a.coeffs[0])
        return None

    def poly_rem(self, a: List[Polynomial], b: List[Polynomial]) -> List[Polynomial]:
        """Remainder of a by b in K[z] (coefficient lists low -> high)."""
        a = _strip_k(list(a))
        b = _strip_k(list(b))
        if not b:
            raise InvalidInputError("Division by zero in K[z]")
        lead_inv = self.inverse(b[-1])
        while len(a) >= len(b):
            factor = self.mul(a[-1], lead_inv)
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[i + shift] = self.reduce(a[i + shift] - factor * c)
            a = _strip_k(a)
        return a

    def poly_gcd(self, polys: Sequence[List[Polynomial]]) -> List[Polynomial]:
        """Monic gcd in K[z] of the given nonzero polynomials."""
        nonzero = [_strip_k([self.reduce(c) for c in p]) for p in polys]
        nonzero = [p for p in nonzero if p]
        if not nonzero:
            raise InvalidInputError("gcd of zero polynomials in K[z]")
        g = nonzero[0]
        for p in nonzero[1:]:
            a, b = g, p
            while b:
                a, b = b, self.poly_rem(a, b)
            g = a
            if len(g) == 1:
                break
        lead_inv = self.inverse(g[-1])
        return [self.mul(c, lead_inv) for c in g]


# ---------------------------------------------------------------------------
# Multi-modular machinery
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def prime_pool() -> Tuple[int, ...]:
    """The largest 50 primes below 2**61, in decreasing order."""
    primes = []
    p = POOL_CEILING
    while len(primes) < POOL_SIZE:
        p = prevprime(p)
        primes.append(p)
    return tuple(primes)


class PrimeStream:
    """Deterministic walk through the prime pool, starting at the configured offset."""

    def __init__(self, task: str = "generic", offset: Optional[int] = None):
        self.task = task
        self._index = settings.arithmetic.prime_offset if offset is None else offset
        self.used: List[int] = []
        self.discarded: List[int] = []

    def next(self) -> int:
        pool = prime_pool()
        if self._index >= len(pool):
            raise LiftFailureError(details={"task": self.task, "primes_used": len(self.used)})
        p = pool[self._index]
        self._index += 1
        self.used.append(p)
        MetricsManager.record_prime(self.task)
        return p

    def discard(self, p: int):
        self.discarded.append(p)
        MetricsManager.record_prime(self.task, unlucky=True)


def run_with_prime(task: Callable[[int], T], stream: PrimeStream) -> Tuple[int, T]:
    """Run ``task`` on the next prime, switching prime and retrying while it is unlucky."""
    for attempt in Retrying(
        stop=stop_after_attempt(settings.arithmetic.max_prime_retries),
        retry=retry_if_exception_type(UnluckyPrimeError),
        reraise=True,
    ):
        with attempt:
            p = stream.next()
            try:
                return p, task(p)
            except UnluckyPrimeError:
                logger.info("Switching prime", extra={"task": stream.task, "prime": str(p)})
                stream.discard(p)
                raise


def nullspace(rows: Sequence[Sequence[int]], p: int, ncols: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Reduced-echelon basis of the right nullspace of a matrix over GF(p).

    Pivots are chosen leftmost-column first; the basis itself is returned in
    reduced row echelon form, so it is unique for the subspace.
    """
    K = _prime_domain(p)
    ncols = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    if ncols == 0:
        return []
    if not rows:
        return [tuple(1 if j == i else 0 for j in range(ncols)) for i in range(ncols)]
    M = DomainMatrix([[K(int(v) % p) for v in row] for row in rows], (len(rows), ncols), K)
    R, pivots = M.rref()
    reduced = [[int(x) % p for x in row] for row in R.to_list()]
    pivots = list(pivots)
    free = [j for j in range(ncols) if j not in set(pivots)]
    if not free:
        return []
    basis = []
    for f in free:
        vec = [0] * ncols
        vec[f] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = (-reduced[i][f]) % p
        basis.append(vec)
    B = DomainMatrix([[K(v) for v in vec] for vec in basis], (len(basis), ncols), K)
    RB, _ = B.rref()
    return [tuple(int(x) % p for x in row) for row in RB.to_list() if any(int(x) % p for x in row)]


def rational_reconstruction(a: int, m: int) -> Optional[Fraction]:
    """Wang's reconstruction: n/d = a mod m with |n|, d <= sqrt(m/2), or None."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def lift_to_rationals(residues: Sequence[Tuple[int, int]]) -> Optional[Fraction]:
    """CRT-combine (value, prime) pairs and reconstruct a rational.

    Returns None ("insufficient moduli") when no rational below the bound
    matches; the caller then asks for more primes.
    """
    primes = [p for _, p in residues]
    if len(set(primes)) != len(primes):
        raise InvalidInputError("lift_to_rationals needs pairwise distinct primes")
    if not residues:
        return None
    combined = crt(primes, [v % p for v, p in residues], symmetric=False)
    if combined is None:
        return None
    value, modulus = (int(x) for x in combined)
    return rational_reconstruction(value, modulus)


def lift_vector(images: Sequence[Tuple[Sequence[int], int]]) -> Optional[List[Fraction]]:
    """Entry-wise lift of equal-length residue vectors; None as soon as one entry fails."""
    if not images:
        return None
    length = len(images[0][0])
    out = []
    for idx in range(length):
        value = lift_to_rationals([(vec[idx], p) for vec, p in images])
        if value is None:
            return None
        out.append(value)
    return out
