"""
ODE Reconstruction

Guess linear differential operators annihilating a truncated series, verify
them exactly, take greatest common right divisors, and read singular points
off the head polynomial.

Fitting runs over GF(p): the linear system for the unknown polynomial
coefficients is built with machine-size residues, its nullspace is computed
per prime, and rational fits are recovered by CRT plus rational
reconstruction, then checked against the full series over the rationals.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from singkit.core.exceptions import (
    DegeneracyError,
    DomainMismatchError,
    FeatureGateError,
    InsufficientTermsError,
    InvalidInputError,
    NotSingularError,
    UnluckyPrimeError,
    VerificationError,
)
from singkit.core.metrics import MetricsManager
from singkit.data import load_golden
from singkit.services.base import BaseEngine
from singkit.services.exactalg import (
    RATIONALS,
    Field,
    Polynomial,
    PrimeStream,
    QuotientRing,
    factor_poly,
    lift_vector,
    nullspace,
    poly_gcd,
    residue,
    run_with_prime,
)
from singkit.services.seriesgen import TruncatedSeries, truncated_product

logger = logging.getLogger(__name__)

INFINITY = "inf"

# Orders above this are the multi-hour mod-p searches; they need enable_stretch_fits.
STRETCH_ORDER = 16


def _symbol_for(variable: str) -> str:
    return "w" if variable == "w" else "x"


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffOperator:
    """sum_i coeffs[i](var) * D^i, stored in primitive normal form."""

    coeffs: Tuple[Polynomial, ...]
    field: Field = RATIONALS
    variable: str = "w"

    def __post_init__(self):
        coeffs = list(self.coeffs)
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        if not coeffs:
            raise InvalidInputError("The zero operator is not a DiffOperator")
        var = _symbol_for(self.variable)
        for c in coeffs:
            if c.field != self.field:
                raise DomainMismatchError(details={"operator": str(self.field), "coeff": str(c.field)})
            if c.var != var and not c.is_zero:
                raise DomainMismatchError("Coefficient variable differs from the operator variable",
                                          details={"operator": var, "coeff": c.var})
        coeffs = [c.rename(var) for c in coeffs]
        object.__setattr__(self, "coeffs", tuple(_normalize_coeffs(coeffs, self.field)))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def head(self) -> Polynomial:
        return self.coeffs[-1]

    @property
    def var(self) -> str:
        return _symbol_for(self.variable)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(int(c.degree) if not c.is_zero else -1 for c in self.coeffs)

    def to_json(self) -> dict:
        return {
            "var": self.variable,
            "order": self.order,
            "coeffs": [c.to_json() for c in self.coeffs],
            "field": self.field.to_json(),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "DiffOperator":
        field = Field.from_json(payload.get("field", {"type": "rational"}))
        variable = payload.get("var", "w")
        coeffs = tuple(Polynomial(tuple(c["coeffs"]), field, _symbol_for(variable)) for c in payload["coeffs"])
        op = cls(coeffs, field, variable)
        if "order" in payload and int(payload["order"]) != op.order:
            raise InvalidInputError("Operator order does not match its coefficient list",
                                    details={"order": payload["order"], "found": op.order})
        return op

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero:
                continue
            d = "" if i == 0 else ("*D" if i == 1 else f"*D^{i}")
            parts.append(f"({c}){d}")
        return " + ".join(parts)


def _normalize_coeffs(coeffs: List[Polynomial], field: Field) -> List[Polynomial]:
    head = coeffs[-1]
    if field.prime is not None:
        inv = field.one / head.lowest_coeff
        return [c.scale(inv) for c in coeffs]
    fracs = [field.to_fraction(v) for c in coeffs for v in c.coeffs]
    den = math.lcm(*(f.denominator for f in fracs))
    content = math.gcd(*(int(f * den) for f in fracs))
    scale = Fraction(den, content)
    if field.to_fraction(head.lowest_coeff) < 0:
        scale = -scale
    return [c.scale(scale) for c in coeffs]


def operator_mod_p(L: DiffOperator, p: int) -> DiffOperator:
    target = Field.mod(p)
    coeffs = tuple(c.over(target) for c in L.coeffs)
    if coeffs[-1].is_zero:
        raise UnluckyPrimeError(p, "operator head vanishes")
    return DiffOperator(coeffs, target, L.variable)


def series_mod_p(s: TruncatedSeries, p: int) -> TruncatedSeries:
    return s.over(Field.mod(p))


# ---------------------------------------------------------------------------
# Raw operator algebra on coefficient lists (no normalization)
# ---------------------------------------------------------------------------

def _strip(ops: List[Polynomial]) -> List[Polynomial]:
    while ops and ops[-1].is_zero:
        ops.pop()
    return ops


def _add_into(acc: List[Polynomial], i: int, value: Polynomial):
    while len(acc) <= i:
        acc.append(Polynomial.zero(value.field, value.var))
    acc[i] = acc[i] + value


def _d_power_times(k: int, ops: Sequence[Polynomial]) -> List[Polynomial]:
    """D^k * sum_i c_i D^i by Leibniz: sum_i sum_l C(k,l) c_i^(l) D^(i+k-l)."""
    out: List[Polynomial] = []
    for i, c in enumerate(ops):
        if c.is_zero:
            continue
        derivative = c
        for l in range(0, k + 1):
            if derivative.is_zero:
                break
            _add_into(out, i + k - l, derivative.scale(math.comb(k, l)))
            derivative = derivative.derivative()
    return _strip(out)


def _op_mul(a: Sequence[Polynomial], b: Sequence[Polynomial]) -> List[Polynomial]:
    out: List[Polynomial] = []
    for i, c in enumerate(a):
        if c.is_zero:
            continue
        for j, term in enumerate(_d_power_times(i, b)):
            if not term.is_zero:
                _add_into(out, j, c * term)
    return _strip(out)


def _primitive(ops: List[Polynomial]) -> List[Polynomial]:
    content = None
    for c in ops:
        if c.is_zero:
            continue
        content = c.normalized() if content is None else poly_gcd(content, c)
        if content.degree == 0:
            break
    if content is None or content.degree <= 0:
        return ops
    return [c.exquo(content) for c in ops]


def _op_prem(a: Sequence[Polynomial], b: Sequence[Polynomial]) -> List[Polynomial]:
    """Right pseudo-remainder: a is repeatedly replaced by lc(b)*a - lc(a)*D^k*b."""
    a = _strip(list(a))
    b = _strip(list(b))
    if not b:
        raise InvalidInputError("Right division by the zero operator")
    while len(a) >= len(b):
        k = len(a) - len(b)
        shifted = _d_power_times(k, b)
        lead_a = a[-1]
        lead_b = b[-1]
        out: List[Polynomial] = []
        for i in range(len(a)):
            term = lead_b * a[i]
            if i < len(shifted):
                term = term - lead_a * shifted[i]
            out.append(term)
        out = _strip(out)
        if len(out) >= len(a):
            raise DegeneracyError("Right pseudo-division did not lower the order")
        a = _primitive(out)
    return a


def multiply(L1: DiffOperator, L2: DiffOperator) -> DiffOperator:
    """The composition L1 * L2 (apply L2 first)."""
    if L1.field != L2.field or L1.variable != L2.variable:
        raise DomainMismatchError()
    return DiffOperator(tuple(_op_mul(L1.coeffs, L2.coeffs)), L1.field, L1.variable)


def right_divides(G: DiffOperator, L: DiffOperator) -> bool:
    """True when L = Q * G for some operator Q with rational-function coefficients."""
    return not _op_prem(L.coeffs, G.coeffs)


# ---------------------------------------------------------------------------
# Applying operators to series
# ---------------------------------------------------------------------------

def apply_operator(L: DiffOperator, s: TruncatedSeries) -> TruncatedSeries:
    """Residual sum_i a_i * s^(i), exact for exponents < s.order - L.order."""
    if L.field != s.field:
        raise DomainMismatchError(details={"operator": str(L.field), "series": str(s.field)})
    if L.variable != s.variable:
        raise DomainMismatchError("Operator and series use different variables",
                                  details={"operator": L.variable, "series": s.variable})
    length = s.order - L.order
    if length <= 0:
        raise InsufficientTermsError("Operator order exceeds the available terms",
                                     details={"order": L.order, "terms": s.order})
    field = s.field
    residual = [field.zero] * length
    derived = list(s.coeffs)
    for i, a in enumerate(L.coeffs):
        if i:
            derived = [c * i_ for i_, c in enumerate(derived)][1:]
        if a.is_zero:
            continue
        term = truncated_product(list(a.coeffs), derived, length, field)
        for m, c in enumerate(term):
            residual[m] += c
    return TruncatedSeries(tuple(residual), field, s.variable, s.meta.with_extra(residual="true"))


def _residual_is_zero(L: DiffOperator, s: TruncatedSeries) -> bool:
    return apply_operator(L, s).is_zero()


# ---------------------------------------------------------------------------
# Ansatz profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnsatzProfile:
    """a_i = known[i] * (free polynomial of degree <= free_degrees[i])."""

    known: Tuple[Polynomial, ...]
    free_degrees: Tuple[int, ...]
    variable: str = "w"

    def __post_init__(self):
        if len(self.known) != len(self.free_degrees):
            raise InvalidInputError("Ansatz needs one known factor per derivative order")
        if any(d < 0 for d in self.free_degrees):
            raise InvalidInputError("Ansatz free degrees must be nonnegative")

    @property
    def order(self) -> int:
        return len(self.known) - 1

    @property
    def unknowns(self) -> int:
        return sum(d + 1 for d in self.free_degrees)

    @classmethod
    def plain(cls, order: int, degree: int, variable: str = "w") -> "AnsatzProfile":
        one = Polynomial.constant(1, RATIONALS, _symbol_for(variable))
        return cls((one,) * (order + 1), (degree,) * (order + 1), variable)

    @classmethod
    def from_head(cls, factors: Sequence[Tuple[str, Sequence[int]]], free_degrees: Sequence[int],
                  variable: str = "w") -> "AnsatzProfile":
        """Build known parts from (factor expression, exponent per derivative order) pairs."""
        var = _symbol_for(variable)
        order = len(free_degrees) - 1
        known = [Polynomial.constant(1, RATIONALS, var) for _ in range(order + 1)]
        for text, exponents in factors:
            if len(exponents) != order + 1:
                raise InvalidInputError("Exponent list length must equal order + 1", details={"factor": text})
            base = Polynomial.parse(text, var)
            for i, e in enumerate(exponents):
                if e < 0:
                    raise InvalidInputError("Ansatz exponents must be nonnegative", details={"factor": text})
                known[i] = known[i] * base ** e
        return cls(tuple(known), tuple(free_degrees), variable)

    def to_json(self) -> dict:
        return {"var": self.variable, "known": [k.to_json() for k in self.known],
                "free_degrees": list(self.free_degrees)}


def phiH3_profile() -> AnsatzProfile:
    """Head-factor ansatz reaching the order-5 operator of Phi_H^(3) from 160 terms."""
    return AnsatzProfile.from_head(
        [
            ("w", [0, 0, 0, 1, 2, 3]),
            ("1-4*w", [0, 0, 1, 2, 3, 4]),
            ("1+4*w", [0, 0, 0, 0, 1, 2]),
            ("1-w", [0, 0, 0, 0, 0, 1]),
            ("1+2*w", [0, 0, 0, 0, 0, 1]),
            ("1+3*w+4*w**2", [0, 0, 0, 0, 0, 1]),
        ],
        [23, 24, 24, 23, 21, 15],
    )


def phiH4_profile() -> AnsatzProfile:
    """Ansatz for the order-6 operator of Phi_H^(4) in x = 16 w^2 (90 x-terms)."""
    return AnsatzProfile.from_head(
        [
            ("x", [0, 0, 0, 1, 2, 3, 4]),
            ("1-x", [1, 0, 0, 1, 2, 3, 4]),
            ("x-4", [0, 0, 0, 0, 0, 0, 1]),
        ],
        [8, 10, 11, 10, 9, 8, 6],
        variable="x=16w2",
    )


def golden_operator(name: str) -> DiffOperator:
    """Reference operator shipped in golden/operators.json, in primitive normal form."""
    table = load_golden("operators")
    if name not in table:
        raise InvalidInputError(f"No reference operator named {name!r}", details={"known": sorted(table)})
    entry = table[name]
    var = _symbol_for(entry["var"])
    coeffs = tuple(Polynomial.parse(text, var=var) for text in entry["coeffs"])
    op = DiffOperator(coeffs, RATIONALS, entry["var"])
    if op.order != int(entry["order"]):
        raise InvalidInputError("Reference operator order does not match its coefficients",
                                details={"name": name, "order": entry["order"], "found": op.order})
    return op


# ---------------------------------------------------------------------------
# Fitting
# ---------------------------------------------------------------------------

def _series_residues(s: TruncatedSeries, p: int) -> List[int]:
    if s.field.prime is not None:
        if s.field.prime != p:
            raise DomainMismatchError(details={"series": str(s.field), "prime": str(p)})
        return [int(c) % p for c in s.coeffs]
    return [residue(s.field.to_fraction(c), p) for c in s.coeffs]


def _poly_residues(poly: Polynomial, p: int) -> List[int]:
    if poly.field.prime is not None:
        return [int(c) % p for c in poly.coeffs]
    return [residue(poly.field.to_fraction(c), p) for c in poly.coeffs]


def _fit_matrix(values: List[int], profile: AnsatzProfile, rows: int, p: int) -> List[List[int]]:
    """Row m: coefficient of var^m in sum_{i,j} u_{i,j} known_i var^j D^i s, mod p."""
    columns: List[List[int]] = []
    derived = list(values)
    for i, (known, free) in enumerate(zip(profile.known, profile.free_degrees)):
        if i:
            derived = [(c * t) % p for t, c in enumerate(derived)][1:]
        base_poly = _poly_residues(known, p)
        base = [0] * rows
        for m in range(rows):
            acc = 0
            for t, f in enumerate(base_poly):
                if t > m:
                    break
                if f:
                    acc += f * derived[m - t]
            base[m] = acc % p
        for j in range(free + 1):
            columns.append([0] * j + base[: rows - j])
    return [[col[m] for col in columns] for m in range(rows)]


def _vector_to_operator(vec: Sequence, profile: AnsatzProfile, field: Field) -> DiffOperator:
    var = _symbol_for(profile.variable)
    coeffs = []
    pos = 0
    for known, free in zip(profile.known, profile.free_degrees):
        free_part = Polynomial(tuple(vec[pos: pos + free + 1]), field, var)
        coeffs.append(known.over(field) * free_part if not free_part.is_zero else free_part)
        pos += free + 1
    coeffs = _strip(coeffs)
    if not coeffs:
        raise DegeneracyError("Nullspace vector describes the zero operator")
    return DiffOperator(tuple(coeffs), field, profile.variable)


def _signature(basis: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    return tuple(next(i for i, v in enumerate(vec) if v) for vec in basis)


class OperatorFitter(BaseEngine):
    """Multi-modular operator guessing."""

    def _check_budget(self, s: TruncatedSeries, profile: AnsatzProfile, guard: int) -> int:
        rows = s.order - profile.order
        if profile.unknowns > rows - guard:
            raise InsufficientTermsError(
                "Not enough series terms for this operator shape",
                details={"unknowns": profile.unknowns, "equations": rows, "guard": guard,
                         "terms_needed": profile.unknowns + guard + profile.order},
            )
        return rows

    def fit_operators(self, s: TruncatedSeries, order: int, degree: int,
                      ansatz: Optional[AnsatzProfile] = None, guard: Optional[int] = None) -> List[DiffOperator]:
        guard = self.config.fit.guard if guard is None else guard
        profile = ansatz or AnsatzProfile.plain(order, degree, s.variable)
        if profile.variable != s.variable:
            raise DomainMismatchError("Ansatz and series use different variables",
                                      details={"ansatz": profile.variable, "series": s.variable})
        if profile.order > STRETCH_ORDER and not self.config.fit.enable_stretch_fits:
            raise FeatureGateError("Operator searches above order 16 need enable_stretch_fits",
                                   details={"order": profile.order, "limit": STRETCH_ORDER})
        rows = self._check_budget(s, profile, guard)

        with MetricsManager.timed("fit_operators"):
            if s.field.prime is not None:
                p = s.field.prime
                basis = nullspace(_fit_matrix(_series_residues(s, p), profile, rows, p), p, profile.unknowns)
                ops = [_vector_to_operator(vec, profile, s.field) for vec in basis]
            else:
                ops = self._fit_rational(s, profile, rows)

        for op in ops:
            if not _residual_is_zero(op, s):
                MetricsManager.record_fit("failed")
                raise VerificationError("Fitted operator leaves a nonzero residual",
                                        details={"order": op.order})
        MetricsManager.record_fit("found" if ops else "empty")
        self.log_info("Operator fit finished", extra={
            "order": profile.order, "unknowns": profile.unknowns, "equations": rows,
            "dimension": len(ops), "field": str(s.field)})
        return ops

    def _fit_rational(self, s: TruncatedSeries, profile: AnsatzProfile, rows: int) -> List[DiffOperator]:
        stream = PrimeStream("fit")

        def image(p: int):
            return nullspace(_fit_matrix(_series_residues(s, p), profile, rows, p), p, profile.unknowns)

        groups: Dict[Tuple[int, ...], List[Tuple[List[Tuple[int, ...]], int]]] = {}
        previous: Optional[List[List[Fraction]]] = None
        while True:
            p, basis = run_with_prime(image, stream)
            if not basis:
                return []
            sig = _signature(basis)
            groups.setdefault(sig, []).append((basis, p))
            # smallest nullspace first: rank drops only ever enlarge it
            best = min(groups, key=lambda g: (len(g), -len(groups[g])))
            images = groups[best]
            lifted = []
            for idx in range(len(best)):
                vec = lift_vector([(b[idx], prime) for b, prime in images])
                if vec is None:
                    lifted = None
                    break
                lifted.append(vec)
            if lifted is None:
                previous = None
                continue
            if lifted != previous:
                previous = lifted
                continue
            ops = [_vector_to_operator(vec, profile, RATIONALS) for vec in lifted]
            if all(_residual_is_zero(op, s) for op in ops):
                self.log_info("Lifted operator basis", extra={"primes": len(images), "dimension": len(ops)})
                return ops
            previous = None

    def minimal_operator(self, s: TruncatedSeries, max_order: int, max_degree: int,
                         guard: Optional[int] = None) -> DiffOperator:
        guard = self.config.fit.guard if guard is None else guard
        tried = []
        for order in range(1, max_order + 1):
            rows = s.order - order
            budget = (rows - guard) // (order + 1) - 1
            degree = min(max_degree, budget)
            if degree < 0:
                break
            tried.append([order, degree])
            basis = self.fit_operators(s, order, degree, guard=guard)
            if not basis:
                continue
            minimal = basis[0]
            for other in basis[1:]:
                minimal = gcrd(minimal, other)
            if minimal.order != order:
                raise VerificationError("GCRD of a minimal-order basis lowered the order",
                                        details={"order": order, "gcrd_order": minimal.order})
            expected_degree = degree - len(basis) + 1
            if max(minimal.degrees) != expected_degree:
                self.log_warning("Minimal operator degree differs from the basis-size estimate",
                                 extra={"degree": max(minimal.degrees), "estimate": expected_degree})
            if not _residual_is_zero(minimal, s):
                raise VerificationError("Minimal operator does not annihilate the series")
            return minimal
        raise InsufficientTermsError("No annihilating operator within the given bounds",
                                     details={"shapes_tried": tried, "terms": s.order})


_fitter = OperatorFitter()


def fit_operators(s: TruncatedSeries, order: int, degree: int, ansatz: Optional[AnsatzProfile] = None,
                  guard: Optional[int] = None) -> List[DiffOperator]:
    return _fitter.fit_operators(s, order, degree, ansatz, guard)


def minimal_operator(s: TruncatedSeries, max_order: int, max_degree: int,
                     guard: Optional[int] = None) -> DiffOperator:
    return _fitter.minimal_operator(s, max_order, max_degree, guard)


# ---------------------------------------------------------------------------
# GCRD
# ---------------------------------------------------------------------------

def _gcrd_coeffs(a: Sequence[Polynomial], b: Sequence[Polynomial]) -> List[Polynomial]:
    a, b = _primitive(_strip(list(a))), _primitive(_strip(list(b)))
    if len(a) < len(b):
        a, b = b, a
    while b:
        a, b = b, _op_prem(a, b)
    return a


def _gcrd_mod_p(L1: DiffOperator, L2: DiffOperator, p: int) -> DiffOperator:
    A = operator_mod_p(L1, p) if L1.field.prime is None else L1
    B = operator_mod_p(L2, p) if L2.field.prime is None else L2
    return DiffOperator(tuple(_gcrd_coeffs(A.coeffs, B.coeffs)), A.field, A.variable)


def gcrd(L1: DiffOperator, L2: DiffOperator) -> DiffOperator:
    """Greatest common right divisor, primitive and normalized.

    Over the rationals the Euclidean sequence runs modulo working primes; the
    image of smallest shape is lifted and verified by exact right division.
    """
    if L1.variable != L2.variable or L1.field != L2.field:
        raise DomainMismatchError()
    if L1.field.prime is not None:
        return _gcrd_mod_p(L1, L2, L1.field.prime)

    stream = PrimeStream("gcrd")
    images: List[Tuple[DiffOperator, int]] = []
    previous = None
    while True:
        p, G = run_with_prime(lambda prime: _gcrd_mod_p(L1, L2, prime), stream)
        shape = G.degrees
        if images and shape != images[0][0].degrees:
            if (G.order, shape) < (images[0][0].order, images[0][0].degrees):
                images = []
            else:
                continue
        images.append((G, p))
        flat = [[int(v) % q for c in op.coeffs for v in c.coeffs] for op, q in images]
        lifted = lift_vector([(vec, q) for vec, (_, q) in zip(flat, images)])
        if lifted is None or lifted != previous:
            previous = lifted
            continue
        var = L1.var
        coeffs, pos = [], 0
        for d in shape:
            coeffs.append(Polynomial(tuple(lifted[pos: pos + d + 1]), RATIONALS, var))
            pos += d + 1
        G_q = DiffOperator(tuple(coeffs), RATIONALS, L1.variable)
        if right_divides(G_q, L1) and right_divides(G_q, L2):
            return G_q
        previous = None


# ---------------------------------------------------------------------------
# Singularities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularityEntry:
    factor: Polynomial
    multiplicity: int = 1
    tags: FrozenSet[str] = frozenset()

    def to_json(self) -> dict:
        return {"factor": self.factor.to_json(), "multiplicity": self.multiplicity, "tags": sorted(self.tags)}

    @classmethod
    def from_json(cls, payload: dict) -> "SingularityEntry":
        factor = Polynomial.from_json(payload["factor"])
        return cls(factor, int(payload.get("multiplicity", 1)), frozenset(payload.get("tags", ())))


@dataclass(frozen=True)
class SingularitySet:
    """Irreducible, primitive, deduplicated factors with provenance tags."""

    entries: Tuple[SingularityEntry, ...] = ()

    @classmethod
    def build(cls, entries: Iterable[SingularityEntry]) -> "SingularitySet":
        merged: Dict[Tuple[str, ...], SingularityEntry] = {}
        for e in entries:
            factor = e.factor.normalized()
            if factor.degree < 1:
                continue
            key = factor.key()
            if key in merged:
                old = merged[key]
                merged[key] = SingularityEntry(factor, max(old.multiplicity, e.multiplicity), old.tags | e.tags)
            else:
                merged[key] = SingularityEntry(factor, e.multiplicity, frozenset(e.tags))
        ordered = sorted(merged.values(), key=lambda e: (e.factor.degree, [len(s) for s in e.factor.key()],
                                                         e.factor.key()))
        return cls(tuple(ordered))

    @classmethod
    def from_polynomials(cls, polys: Iterable[Polynomial], tag: str) -> "SingularitySet":
        entries = []
        for poly in polys:
            if poly.degree < 1:
                continue
            for f, m in factor_poly(poly).factors:
                entries.append(SingularityEntry(f, m, frozenset({tag})))
        return cls.build(entries)

    def union(self, other: "SingularitySet") -> "SingularitySet":
        return SingularitySet.build(self.entries + other.entries)

    def factors(self) -> List[Polynomial]:
        return [e.factor for e in self.entries]

    def keys(self) -> List[Tuple[str, ...]]:
        return [e.factor.key() for e in self.entries]

    def contains(self, poly: Polynomial) -> bool:
        """True when every irreducible factor of poly is in the set."""
        own = set(self.keys())
        return all(f.key() in own for f, _ in factor_poly(poly).factors)

    def missing(self, polys: Iterable[Polynomial]) -> List[Polynomial]:
        own = set(self.keys())
        out = []
        for poly in polys:
            for f, _ in factor_poly(poly).factors:
                if f.key() not in own:
                    out.append(f)
        return out

    def tags_of(self, factor: Polynomial) -> FrozenSet[str]:
        """Provenance of an irreducible factor; empty when it is not in the set."""
        key = factor.normalized().key()
        return next((e.tags for e in self.entries if e.factor.key() == key), frozenset())

    def tagged(self, prefix: str) -> "SingularitySet":
        return SingularitySet(tuple(e for e in self.entries if any(t.startswith(prefix) for t in e.tags)))

    def product(self) -> Polynomial:
        if not self.entries:
            return Polynomial.constant(1)
        out = self.entries[0].factor
        for e in self.entries[1:]:
            out = out * e.factor
        return out.normalized()

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> dict:
        return {"entries": [e.to_json() for e in self.entries]}

    @classmethod
    def from_json(cls, payload) -> "SingularitySet":
        items = payload["entries"] if isinstance(payload, dict) else payload
        return cls.build(SingularityEntry.from_json(e) for e in items)


def head_singularities(L: DiffOperator) -> SingularitySet:
    return SingularitySet.build(
        SingularityEntry(f, m, frozenset({"head"})) for f, m in factor_poly(L.head).factors
    )


def _multiplicity_in(poly: Polynomial, factor: Polynomial) -> Tuple[int, Polynomial]:
    mult = 0
    while True:
        q, r = poly.divmod(factor)
        if not r.is_zero:
            return mult, poly
        poly, mult = q, mult + 1


def _rising(rho: Polynomial, i: int, sign: int) -> Polynomial:
    """rho (rho - 1) ... (rho - i + 1) for sign = -1, rho (rho + 1) ... for sign = +1."""
    out = Polynomial.constant(1, RATIONALS, "rho")
    for t in range(i):
        out = out * (rho + Polynomial.constant(sign * t, RATIONALS, "rho"))
    return out


def indicial_polynomial(L: DiffOperator, point: Union[Polynomial, str]) -> Polynomial:
    """Indicial polynomial in rho at the roots of an irreducible factor, or at infinity.

    At a finite point with local parameter t, a_i ~ c_i t^{mu_i}; the terms with
    mu_i - i minimal contribute c_i rho(rho-1)...(rho-i+1). The c_i live in
    QQ[w]/(f); the result is returned with rational coefficients after
    dividing by one of them. At infinity the exponents refer to var^(-rho).
    """
    if L.field.prime is not None:
        raise DomainMismatchError("Indicial polynomials are computed over the rationals")
    rho = Polynomial.monomial(1, RATIONALS, "rho")
    if isinstance(point, str):
        if point != INFINITY:
            raise InvalidInputError(f"Unknown point {point!r}")
        shifts = [(int(a.degree) - i, i, a) for i, a in enumerate(L.coeffs) if not a.is_zero]
        top = max(s for s, _, _ in shifts)
        result = Polynomial.zero(RATIONALS, "rho")
        for shift, i, a in shifts:
            if shift == top:
                sign = -1 if i % 2 else 1
                result = result + _rising(rho, i, 1).scale(a.leading_coeff * sign)
        return result.normalized()

    f = point.over(RATIONALS).rename(L.var).normalized()
    if f.degree < 1:
        raise InvalidInputError("Point factor must have positive degree")
    if len(factor_poly(f).factors) != 1 or factor_poly(f).factors[0][1] != 1:
        raise InvalidInputError("Point factor must be irreducible", details={"factor": str(f)})
    is_origin = f.key() == ("0", "1")
    if not is_origin and not f.divides(L.head):
        raise NotSingularError(details={"factor": str(f)})

    ring = QuotientRing(f)
    df = ring.reduce(f.derivative())
    terms = []
    for i, a in enumerate(L.coeffs):
        if a.is_zero:
            continue
        mu, cofactor = _multiplicity_in(a, f)
        lead = ring.reduce(cofactor)
        for _ in range(mu):
            lead = ring.mul(lead, df)
        terms.append((mu - i, i, lead))
    nu = min(t for t, _, _ in terms)
    selected = [(i, lead) for t, i, lead in terms if t == nu]
    top_i, top_lead = max(selected, key=lambda item: item[0])
    inv = ring.inverse(top_lead)
    result = Polynomial.zero(RATIONALS, "rho")
    for i, lead in selected:
        ratio = ring.as_rational(ring.mul(lead, inv))
        if ratio is None:
            raise DegeneracyError("Indicial coefficients are not rational multiples of each other",
                                  details={"factor": str(f)})
        result = result + _rising(rho, i, -1).scale(ratio)
    return result.normalized()


def integer_exponents(indicial: Polynomial) -> List[int]:
    """Integer roots of an indicial polynomial, with multiplicity."""
    roots = []
    for f, m in factor_poly(indicial).factors:
        if f.degree == 1:
            root = -f.field.to_fraction(f.coeffs[0]) / f.field.to_fraction(f.coeffs[1])
            if root.denominator == 1:
                roots.extend([int(root)] * m)
    return sorted(roots)


def classify_singularities(L: DiffOperator) -> SingularitySet:
    """head_singularities plus the "apparent-candidate" tag where the exponents are
    L.order distinct nonnegative integers."""
    entries = []
    for e in head_singularities(L).entries:
        tags = set(e.tags)
        try:
            indicial = indicial_polynomial(L, e.factor)
            exps = integer_exponents(indicial)
            if indicial.degree == L.order and len(set(exps)) == L.order and all(x >= 0 for x in exps):
                tags.add("apparent-candidate")
        except DegeneracyError:
            logger.info("Skipping apparent screen", extra={"factor": str(e.factor)})
        entries.append(SingularityEntry(e.factor, e.multiplicity, frozenset(tags)))
    return SingularitySet.build(entries)


def format_operator(L: DiffOperator) -> str:
    """Pretty form: one factored coefficient per line, head first."""
    lines = []
    for i in range(L.order, -1, -1):
        c = L.coeffs[i]
        text = "0" if c.is_zero else str(factor_poly(c))
        lines.append(f"a{i}({L.var}) = {text}")
    return "\n".join(lines)
