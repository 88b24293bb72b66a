"""
Modular j-function checks

Exact verification of the complex-multiplication statements attached to the
Landen transformation:

- the j-invariant as a rational function of the modulus k (and of w)
- its behaviour under ascending and descending Landen maps
- the level 2 and level 4 modular curves obtained by elimination
- fixed-point conditions of the Landen maps
- the Heegner table written as polynomial conditions in w

Every CM claim is decided by reduction in QQ[x]/(f). Floating point only
enters through ``nome_tau``.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import sympy
from sympy import Poly, QQ, Symbol

from singkit.core.cache import cached_artifact
from singkit.core.exceptions import (
    ConvergenceError,
    DegeneracyError,
    DomainMismatchError,
    InvalidInputError,
)
from singkit.core.metrics import MetricsManager
from singkit.core.schemas import CheckResult
from singkit.data import load_golden
from singkit.services.base import BaseEngine
from singkit.services.exactalg import (
    RATIONALS,
    BivariatePolynomial,
    FactoredPolynomial,
    Polynomial,
    QuotientRing,
    factor_poly,
    poly_gcd,
)
from singkit.services.landau import singularity_set
from singkit.services.numerics import agm_elliptic_K, poly_roots, w_to_s_points

logger = logging.getLogger(__name__)

_K = Symbol("k")
_W = Symbol("w")
_M = Symbol("m")
_V = Symbol("v")
_S = Symbol("s")
_T = Symbol("t")
_J = Symbol("j")

# CM values of class number one
RATIONAL_CM_VALUES = frozenset({
    0, 1728, -3375, 8000, -32768, 54000, 287496, -884736, -12288000, 16581375,
    -884736000, -147197952000, -262537412640768000,
})

# Fixed-point pairs whose reference factor list is complete; the (j,j2) and
# (jm1,j2) lists leave out fixed points already present at lower level.
COMPLETE_FIXED_LISTS = frozenset({"(j,j1)"})


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------

def _float_eval(p: Polynomial, z: complex) -> complex:
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * z + float(p.field.to_fraction(c))
    return acc


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """numerator/denominator over QQ, kept reduced with a primitive denominator."""

    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self):
        num, den = self.numerator, self.denominator
        if den.is_zero:
            raise InvalidInputError("Rational function with zero denominator")
        if num.var != den.var or num.field != den.field:
            raise DomainMismatchError(details={"numerator": num.var, "denominator": den.var})
        if num.is_zero:
            den = Polynomial.constant(1, den.field, den.var)
        else:
            g = poly_gcd(num, den)
            if g.degree >= 1:
                num, den = num.exquo(g), den.exquo(g)
        lam = den.normalization_factor()
        object.__setattr__(self, "numerator", num.scale(lam))
        object.__setattr__(self, "denominator", den.scale(lam))

    @classmethod
    def from_expr(cls, expr: sympy.Expr, var: str) -> "RationalFunction":
        symbol = Symbol(var)
        num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
        return cls(Polynomial.from_sympy(Poly(num, symbol, domain=QQ), RATIONALS, var),
                   Polynomial.from_sympy(Poly(den, symbol, domain=QQ), RATIONALS, var))

    @property
    def var(self) -> str:
        return self.numerator.var

    @property
    def degree(self) -> int:
        return max(int(self.numerator.degree), int(self.denominator.degree))

    def to_expr(self) -> sympy.Expr:
        return self.numerator.to_expr() / self.denominator.to_expr()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.var != other.var:
            return False
        return self.numerator * other.denominator == other.numerator * self.denominator

    def __hash__(self):
        return hash((self.numerator.key(), self.denominator.key()))

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.numerator * other.denominator - other.numerator * self.denominator,
                                self.denominator * other.denominator)

    def compose(self, inner: sympy.Expr, var: str) -> "RationalFunction":
        """self(inner), with ``inner`` an expression in ``var``."""
        return RationalFunction.from_expr(self.to_expr().subs(Symbol(self.var), inner), var)

    def evaluate(self, x):
        """Exact value at a rational point, floating value at a complex one."""
        field = self.numerator.field
        if isinstance(x, (int, Fraction)):
            point = field.convert(x)
            num = field.to_fraction(self.numerator.evaluate(point))
            den = field.to_fraction(self.denominator.evaluate(point))
        else:
            num, den = _float_eval(self.numerator, complex(x)), _float_eval(self.denominator, complex(x))
        if den == 0:
            raise DegeneracyError("Pole of the rational function", details={"at": str(x)})
        return num / den

    def reduce_mod(self, modulus: Polynomial) -> Polynomial:
        """Image in QQ[var]/(modulus) for an irreducible modulus."""
        ring = QuotientRing(modulus.rename(self.var))
        if ring.reduce(self.denominator).is_zero:
            raise DegeneracyError("Modulus divides the denominator",
                                  details={"modulus": str(modulus), "denominator": str(self.denominator)})
        return ring.fraction(self.numerator, self.denominator)

    def value_mod(self, modulus: Polynomial) -> Optional[Fraction]:
        """The rational value taken at the roots of ``modulus``, or None when it is irrational."""
        ring = QuotientRing(modulus.rename(self.var))
        return ring.as_rational(self.reduce_mod(modulus))

    def __str__(self) -> str:
        return f"({self.numerator})/({self.denominator})"


# ---------------------------------------------------------------------------
# j-functions
# ---------------------------------------------------------------------------

def _j_forms() -> Dict[str, Tuple[Symbol, sympy.Expr, sympy.Expr]]:
    k, w = _K, _W
    return {
        "j_of_k": (k, 256 * (1 - k**2 + k**4) ** 3, k**4 * (1 - k**2) ** 2),
        "j_of_w": (w, (1 - 16 * w**2 + 16 * w**4) ** 3, (1 - 16 * w**2) * w**8),
        "j1": (k, 16 * (1 + 14 * k**2 + k**4) ** 3, k**2 * (1 - k**2) ** 4),
        "j2": (k, 4 * (k**4 + 60 * k**3 + 134 * k**2 + 60 * k + 1) ** 3, k * (1 + k) ** 2 * (1 - k) ** 8),
        "jm1": (k, 16 * (k**4 - 16 * k**2 + 16) ** 3, k**8 * (1 - k**2)),
    }


# j and j1 as functions of the parameter m = k^2
_J_OF_M = 256 * (1 - _M + _M**2) ** 3 / (_M**2 * (1 - _M) ** 2)
_J1_OF_M = 16 * (1 + 14 * _M + _M**2) ** 3 / (_M * (1 - _M) ** 4)


def j_rational(which: str) -> RationalFunction:
    forms = _j_forms()
    if which not in forms:
        raise InvalidInputError(f"Unknown j-function {which!r}", details={"known": sorted(forms)})
    symbol, num, den = forms[which]
    var = str(symbol)
    return RationalFunction(Polynomial.from_sympy(Poly(num, symbol, domain=QQ), RATIONALS, var),
                            Polynomial.from_sympy(Poly(den, symbol, domain=QQ), RATIONALS, var))


def verify_landen_composition(which: str) -> bool:
    """j composed with an ascending or descending Landen map equals the displayed form.

    The descending map needs v = sqrt(1 - k^2); the comparison is done in
    QQ(k)[v]/(v^2 - (1 - k^2)).
    """
    kappa = 4 * _K / (1 + _K) ** 2
    if which == "up":
        lhs = RationalFunction.from_expr(_J_OF_M.subs(_M, kappa), "k")
        return lhs == j_rational("j1")
    if which in ("up2", "up²"):
        lhs = RationalFunction.from_expr(_J1_OF_M.subs(_M, kappa), "k")
        return lhs == j_rational("j2")
    if which == "down":
        kappa_down = ((1 - _V) / (1 + _V)) ** 2
        diff = _J_OF_M.subs(_M, kappa_down) - j_rational("jm1").to_expr()
        num, _ = sympy.fraction(sympy.together(diff))
        remainder = sympy.rem(sympy.expand(num), _V**2 - (1 - _K**2), _V)
        return sympy.expand(remainder) == 0
    raise InvalidInputError(f"Unknown Landen composition {which!r}", details={"known": ["up", "up2", "down"]})


def verify_w_parametrization() -> bool:
    """j_of_w(w) == j_of_k(k) under k = s^2, 2w = s/(1+s^2), as an identity in s."""
    jw = j_rational("j_of_w").compose(_S / (2 * (1 + _S**2)), "s")
    jk = j_rational("j_of_k").compose(_S**2, "s")
    return jw == jk


# ---------------------------------------------------------------------------
# Modular curves
# ---------------------------------------------------------------------------

_PAIRS = {"j1": ("j", "j1"), "j2": ("j", "j2")}


def _pair_name(pair: Union[str, Sequence[str]]) -> str:
    if isinstance(pair, str):
        name = pair.replace("(", "").replace(")", "").replace(" ", "").split(",")[-1]
    else:
        name = tuple(pair)[-1]
    if name not in _PAIRS:
        raise InvalidInputError(f"Unknown modular curve {pair!r}", details={"known": ["(j,j1)", "(j,j2)"]})
    return name


def _normalize_curve(poly: Poly) -> Poly:
    _, integral = poly.clear_denoms(convert=True)
    _, prim = integral.primitive()
    if prim.LC(order="grlex") < 0:
        prim = -prim
    return prim


def _pick_curve(res: Poly, label: str) -> Poly:
    """The unique irreducible factor of ``res`` that involves both variables."""
    outer, inner = res.gens
    _, factors = res.sqf_part().factor_list()
    both = [f for f, _ in factors if f.degree(outer) > 0 and f.degree(inner) > 0
            and f.as_expr() != outer - inner and f.as_expr() != inner - outer]
    if len(both) != 1:
        raise DegeneracyError("Elimination did not isolate a single modular curve",
                              details={"curve": label, "candidates": len(both)})
    return _normalize_curve(both[0])


def _curve_from_json(payload: dict) -> BivariatePolynomial:
    return BivariatePolynomial.from_json(payload)


class ModularEngine(BaseEngine):

    def gamma1(self) -> Poly:
        """Eliminate m = k^2 between j(m) and j1(m)."""
        j1 = Symbol("j1")
        with MetricsManager.timed("modular_curve"):
            num_a, den_a = sympy.fraction(sympy.together(_J_OF_M))
            num_b, den_b = sympy.fraction(sympy.together(_J1_OF_M))
            f = Poly(sympy.expand(num_a - _J * den_a), _M, j1, _J, domain=QQ)
            g = Poly(sympy.expand(num_b - j1 * den_b), _M, j1, _J, domain=QQ)
            MetricsManager.record_resultant(self.config.arithmetic.resultant_method)
            res = Poly(f.resultant(g).as_expr(), j1, _J, domain=QQ)
            curve = _pick_curve(res, "(j,j1)")
        self.log_info("Eliminated the level 2 curve", extra={"degree": curve.total_degree()})
        return curve

    def gamma2(self) -> Poly:
        """Compose two level 2 steps through the intermediate invariant and drop the backtracking factor."""
        j1, j2 = Symbol("j1"), Symbol("j2")
        g1 = modular_curve("j1").to_sympy().as_expr()
        with MetricsManager.timed("modular_curve"):
            first = Poly(g1.subs({j1: _T}, simultaneous=True), _T, _J, domain=QQ)
            second = Poly(g1.subs({_J: _T, j1: j2}, simultaneous=True), _T, j2, _J, domain=QQ)
            MetricsManager.record_resultant(self.config.arithmetic.resultant_method)
            res = Poly(Poly(first.as_expr(), _T, j2, _J).resultant(second).as_expr(), j2, _J, domain=QQ)
            curve = _pick_curve(res, "(j,j2)")
        self.log_info("Eliminated the level 4 curve", extra={"degree": curve.total_degree()})
        return curve

    def fixed_point_condition(self, pair: str) -> "FixedPointResult":
        if pair == "modulus-map":
            num = Polynomial.parse("4*k - k**2*(1+k)**2", var="k")
        else:
            left, right = _fixed_pair(pair)
            diff = j_rational(left) - j_rational(right)
            num = diff.numerator
        factored = factor_poly(num.normalized())
        kept, degenerate = [], []
        for f, mult in factored.factors:
            (degenerate if f.key() in _DEGENERATE_K else kept).append((f, mult))
        result = FixedPointResult(
            pair=pair,
            factors=FactoredPolynomial(factored.unit, tuple(kept), RATIONALS, "k"),
            degenerate=tuple(degenerate),
        )
        self.log_info("Fixed-point condition", extra={"pair": pair, "factors": len(kept),
                                                      "degenerate": len(degenerate)})
        return result

    def gamma2_fixed_points(self) -> List[Polynomial]:
        j2 = Symbol("j2")
        diagonal = modular_curve("j2").to_sympy().as_expr().subs(j2, _J)
        poly = Polynomial.from_sympy(Poly(diagonal, _J, domain=QQ), RATIONALS, "j")
        return [f for f, _ in factor_poly(poly.normalized()).factors]

    def heegner_check(self, entry: "HeegnerEntry") -> CheckResult:
        jw = j_rational("j_of_w")
        target = Fraction(entry.j_value)
        rows = []
        passed = True
        for condition in entry.condition:
            for f, _ in factor_poly(condition).factors:
                try:
                    value = jw.value_mod(f)
                except DegeneracyError:
                    rows.append({"factor": str(f), "status": "degenerate"})
                    passed = False
                    continue
                ok = value == target
                passed = passed and ok
                rows.append({"factor": str(f), "j": None if value is None else str(value), "ok": ok})
        return CheckResult(check=f"heegner:{entry.label}", status="pass" if passed else "fail",
                           details={"d": entry.d, "j": str(entry.j_value), "factors": rows})

    def cm_scan(self, n_max: int, n_min: int = 3) -> dict:
        """Scan the singularity factors for rational j-values.

        Every linear factor gives a rational j, so only integer values from
        the class-number-one list count as CM hits.
        """
        jw = j_rational("j_of_w")
        hits, rational, degenerate = [], [], []
        for n in range(n_min, n_max + 1):
            for f in singularity_set(n).factors():
                try:
                    value = jw.value_mod(f)
                except DegeneracyError:
                    degenerate.append({"n": n, "factor": str(f)})
                    continue
                if value is None:
                    continue
                record = {"n": n, "factor": str(f), "j": str(value)}
                if value.denominator == 1 and int(value) in RATIONAL_CM_VALUES:
                    hits.append(record)
                else:
                    rational.append(record)
        self.log_info("CM scan finished", extra={"n_max": n_max, "hits": len(hits)})
        return {"n_min": n_min, "n_max": n_max, "cm": hits, "rational": rational, "degenerate": degenerate}


_engine = ModularEngine()


@cached_artifact("modular", dump=lambda b: b.to_json(), load=_curve_from_json)
def modular_curve(pair: Union[str, Sequence[str]]) -> BivariatePolynomial:
    """Primitive bivariate relation between j and j1 (or j2); outer variable j1/j2, inner j."""
    name = _pair_name(pair)
    curve = _engine.gamma1() if name == "j1" else _engine.gamma2()
    return BivariatePolynomial.from_sympy(curve)


def _eval_curve(curve: BivariatePolynomial, outer_value: Fraction, inner_value: Fraction) -> Fraction:
    acc = Fraction(0)
    for i, c in enumerate(curve.coeffs):
        acc += c.evaluate(inner_value) * outer_value ** i
    return acc


def verify_curve_parametrization(pair: Union[str, Sequence[str]]) -> bool:
    """Gamma(j_of_k(k), j'(k)) == 0 identically, decided at enough rational points.

    The numerator after clearing denominators has degree at most
    deg_j * deg(j_of_k) + deg_j' * deg(j'), so vanishing at that many
    distinct points proves the identity.
    """
    name = _pair_name(pair)
    curve = modular_curve(name)
    ja, jb = j_rational("j_of_k"), j_rational(name)
    inner_deg = max(int(c.degree) for c in curve.coeffs)
    bound = inner_deg * ja.degree + int(curve.degree) * jb.degree
    checked, k = 0, 2
    while checked <= bound:
        x = Fraction(k)
        k += 1
        try:
            a, b = ja.evaluate(x), jb.evaluate(x)
        except DegeneracyError:
            continue
        if _eval_curve(curve, b, a) != 0:
            return False
        checked += 1
    return True


def gamma2_fixed_points() -> List[Polynomial]:
    return _engine.gamma2_fixed_points()


# ---------------------------------------------------------------------------
# Fixed points of the Landen maps
# ---------------------------------------------------------------------------

_DEGENERATE_K = frozenset(Polynomial.parse(text, var="k").key() for text in ("k", "1-k", "1+k"))

_FIXED_PAIRS = {"(j,j1)": ("j_of_k", "j1"), "(j,j2)": ("j_of_k", "j2"), "(jm1,j2)": ("jm1", "j2")}


def _fixed_pair(pair: str) -> Tuple[str, str]:
    key = pair.replace(" ", "")
    if not key.startswith("("):
        key = f"({key})"
    if key not in _FIXED_PAIRS:
        raise InvalidInputError(f"Unknown fixed-point pair {pair!r}",
                                details={"known": ["modulus-map"] + sorted(_FIXED_PAIRS)})
    return _FIXED_PAIRS[key]


@dataclass(frozen=True)
class FixedPointResult:
    pair: str
    factors: FactoredPolynomial
    degenerate: Tuple[Tuple[Polynomial, int], ...]

    def contains(self, poly: Polynomial) -> bool:
        keys = set(self.factors.keys())
        return all(f.key() in keys for f, _ in factor_poly(poly.rename("k")).factors)

    def to_json(self) -> dict:
        return {
            "pair": self.pair,
            "factors": self.factors.to_json(),
            "degenerate": [[f.to_json(), m] for f, m in self.degenerate],
        }


def fixed_point_condition(pair: str) -> FixedPointResult:
    return _engine.fixed_point_condition(pair)


# ---------------------------------------------------------------------------
# Heegner table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeegnerEntry:
    label: str
    d: int
    j_value: int
    condition: Tuple[Polynomial, ...]

    def to_json(self) -> dict:
        return {"label": self.label, "d": self.d, "j": str(self.j_value),
                "condition": [c.to_json() for c in self.condition]}


_P3 = "1 - 48*w**2 + 816*w**4 - 5632*w**6 + 45824*w**8 - 536576*w**10 + 4096*w**12"


def _p_d(n_shift: int) -> Polynomial:
    return Polynomial.parse(f"{_P3} + {n_shift}*(1-16*w**2)*w**8")


def _entry(label: str, d: int, j_value: int, *conditions: str) -> HeegnerEntry:
    return HeegnerEntry(label, d, j_value, tuple(Polynomial.parse(c) for c in conditions))


def _build_table() -> Tuple[HeegnerEntry, ...]:
    rows = [
        _entry("d=1", 1, 12**3, "1-8*w**2", "1-16*w**2-8*w**4"),
        _entry("d=2", 2, 20**3, "64*w**4+16*w**2-1", "64*w**8+1792*w**6-368*w**4+32*w**2-1"),
        _entry("d=3", 3, 0, "1-16*w**2+16*w**4"),
        _entry("d=7", 7, (-15) ** 3, "1-31*w**2+256*w**4", "1-16*w**2+w**4", "1+3*w+4*w**2", "1-3*w+4*w**2"),
        _entry("d=11", 11, (-32) ** 3, _P3),
    ]
    for d, m, shift in ((19, 96, 851968), (43, 960, 884703232), (67, 5280, 147197919232),
                        (163, 640320, 262537412640735232)):
        rows.append(HeegnerEntry(f"d={d}", d, (-m) ** 3, (_p_d(shift),)))
    rows.append(_entry("tau=2i", 16, 66**3, "1-32*w**2"))
    rows.append(_entry("tau=i*sqrt(3)", 12, 2 * 30**3, "1-16*w**2+256*w**4"))
    return tuple(rows)


HEEGNER_TABLE: Tuple[HeegnerEntry, ...] = _build_table()


def heegner_check(entry: HeegnerEntry) -> CheckResult:
    return _engine.heegner_check(entry)


def heegner_verify(entry: HeegnerEntry) -> bool:
    """j_of_w takes the stated integer value on every irreducible factor of the condition."""
    result = heegner_check(entry)
    degenerate = [row for row in result.details["factors"] if row.get("status") == "degenerate"]
    if degenerate:
        raise DegeneracyError("Condition factor divides the j denominator",
                              details={"entry": entry.label, "factors": degenerate})
    return result.passed


# ---------------------------------------------------------------------------
# Class-number-two value
# ---------------------------------------------------------------------------

def _jquadra() -> Polynomial:
    return Polynomial.parse(load_golden("modular")["jquadra"], var="j")


def jquadra_check() -> bool:
    """-4096 (15 + 7 sqrt 5)^3 is a root of the quadratic, decided in QQ[t]/(t^2 - 5)."""
    ring = QuotientRing(Polynomial.parse("t**2 - 5", var="t"))
    value = ring.reduce((Polynomial.parse("15 + 7*t", var="t") ** 3).scale(-4096))
    acc = Polynomial.zero(RATIONALS, "t")
    for c in reversed(_jquadra().coeffs):
        acc = ring.reduce(ring.mul(acc, value) + Polynomial.constant(c, RATIONALS, "t"))
    return acc.is_zero


# ---------------------------------------------------------------------------
# Nome
# ---------------------------------------------------------------------------

def nome_tau(value: complex, kind: str = "k") -> complex:
    """tau = i K(1-m)/K(m) with m = k^2; a w argument goes through k = s^2."""
    if kind == "w":
        k = complex(w_to_s_points(value)[1]) ** 2
    elif kind == "k":
        k = complex(value)
    else:
        raise InvalidInputError(f"Unknown nome argument kind {kind!r}")
    m = k * k
    if not (math.isfinite(m.real) and math.isfinite(m.imag)) or abs(m) < 1e-300 or m == 1:
        raise ConvergenceError("Lattice degenerates at m in {0, 1, infinity}", details={"m": str(m)})
    tau = 1j * agm_elliptic_K(1 - m) / agm_elliptic_K(m)
    if tau.imag < 0:
        tau = tau.conjugate()
    return complex(tau)


def nome(tau: complex) -> complex:
    """q = exp(i pi tau)."""
    return complex(mpmath.exp(1j * mpmath.pi * tau))


def j_numeric(tau: complex) -> complex:
    return complex(1728 * mpmath.kleinj(tau))


def tau_satisfies(tau: complex, quadratics: Sequence[Tuple[int, int, int]], tol: float = 1e-9) -> bool:
    """True when a*tau^2 + b*tau + c vanishes (within tol) for one of the (a, b, c)."""
    return any(abs(a * tau * tau + b * tau + c) < tol for a, b, c in quadratics)


# ---------------------------------------------------------------------------
# Minimal polynomials of j at algebraic moduli
# ---------------------------------------------------------------------------

def j_minimal_polynomials(f: Polynomial, which: str = "j_of_k") -> List[Polynomial]:
    """Irreducible factors in QQ[j] of Res_k(f(k), N(k) - j D(k)) for j = N/D."""
    jf = j_rational(which)
    if f.var != jf.var:
        raise DomainMismatchError(f"{which} is a function of {jf.var}, got a polynomial in {f.var}",
                                  details={"expected": jf.var, "got": f.var})
    symbol = Symbol(jf.var)
    elim = sympy.expand(jf.numerator.to_expr() - _J * jf.denominator.to_expr())
    res = sympy.resultant(f.to_expr(), elim, symbol)
    MetricsManager.record_resultant("sympy")
    _, factors = sympy.factor_list(Poly(res, _J, domain=QQ))
    return [Polynomial.from_sympy(g, RATIONALS, "j").normalized() for g, _ in factors]


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _golden() -> dict:
    return load_golden("modular")


def _check(name: str, ok: bool, **details) -> CheckResult:
    return CheckResult(check=name, status="pass" if ok else "fail", details=details)


def curve_checks(include_level4: bool = True) -> List[CheckResult]:
    checks = [_check(f"landen:{which}", verify_landen_composition(which)) for which in ("up", "up2", "down")]
    checks.append(_check("j_of_w:parametrization", verify_w_parametrization()))
    gamma1 = modular_curve("j1")
    expected = sympy.sympify(_golden()["gamma1"], locals={"j": _J, "j1": Symbol("j1")})
    checks.append(_check("curve:(j,j1):display", sympy.expand(gamma1.to_sympy().as_expr() - expected) == 0))
    swapped = gamma1.to_sympy().as_expr().subs({Symbol("j1"): _J, _J: Symbol("j1")}, simultaneous=True)
    checks.append(_check("curve:(j,j1):symmetric", sympy.expand(swapped - gamma1.to_sympy().as_expr()) == 0))
    diagonal = Poly(gamma1.to_sympy().as_expr().subs(Symbol("j1"), _J), _J, domain=QQ)
    missing = [v for v in _golden()["gamma1_diagonal"] if diagonal.eval(v) != 0]
    checks.append(_check("curve:(j,j1):diagonal", not missing, missing=missing))
    if include_level4:
        checks.append(_check("curve:(j,j2):parametrization", verify_curve_parametrization("j2")))
    return checks


def fixed_checks(include_cubics: bool = True) -> List[CheckResult]:
    golden = _golden()
    checks = []
    for pair, expected in golden["fixed"].items():
        result = fixed_point_condition(pair)
        missing = [e for e in expected if not result.contains(Polynomial.parse(e, var="k"))]
        extra = []
        if pair in COMPLETE_FIXED_LISTS:
            keys = {Polynomial.parse(e, var="k").normalized().key() for e in expected}
            extra = [str(f) for f, _ in result.factors.factors if f.key() not in keys]
        checks.append(_check(f"fixed:{pair}", not missing and not extra, missing=missing, extra=extra,
                             factors=str(result.factors)))
    keys = {f.key() for f in gamma2_fixed_points()}
    missing = [e for e in golden["gamma2_diagonal"] if Polynomial.parse(e, var="j").normalized().key() not in keys]
    checks.append(_check("fixed:gamma2-diagonal", not missing, missing=missing))
    if include_cubics:
        found = set()
        for sextic in golden["fixed"]["(jm1,j2)"]:
            f = Polynomial.parse(sextic, var="k")
            for which in ("j_of_k", "jm1", "j2"):
                found.update(g.key() for g in j_minimal_polynomials(f, which))
        missing = [c for c in golden["fixed_j_cubics"] if Polynomial.parse(c, var="j").normalized().key() not in found]
        checks.append(_check("fixed:(jm1,j2):j-cubics", not missing, missing=missing))
    checks.append(_check("jquadra", jquadra_check()))
    return checks


def heegner_checks(entries: Optional[Sequence[HeegnerEntry]] = None) -> List[CheckResult]:
    return [heegner_check(e) for e in (entries or HEEGNER_TABLE)]


def nome_checks() -> List[CheckResult]:
    checks = []
    quadratics = [tuple(q) for q in _golden()["tau_quadratics_7"]]
    quadratic = Polynomial.parse("k**2+3*k+4", var="k")
    jk = j_rational("j_of_k")
    for root in (pt.value for pt in poly_roots(quadratic)):
        tau = nome_tau(root)
        j_num = j_numeric(tau)
        exact = complex(jk.evaluate(root))
        checks.append(_check(f"nome:k={root:.6g}", tau_satisfies(tau, quadratics)
                             and abs(j_num - exact) <= 1e-6 * abs(exact),
                             tau=str(tau), j=str(j_num)))
    for w in (1 / math.sqrt(32), -1 / math.sqrt(32)):
        tau = nome_tau(w, kind="w")
        j_num = j_numeric(tau)
        checks.append(_check(f"nome:w={w:.6g}", abs(j_num - 66**3) <= 1e-6 * 66**3,
                             tau=str(tau), j=str(j_num)))
    return checks


def cm_scan(n_max: int, n_min: int = 3) -> dict:
    return _engine.cm_scan(n_max, n_min)
