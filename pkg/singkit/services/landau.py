"""
Landau Singularity Families

Exact polynomial conditions in w for the pinch singularities of the
Ising-class integrals:

- family 1: T_{2p1}(1/2w + 1) = T_{n-2p1-2p2}(1/2w - 1)
- family 2: elimination of z between three Chebyshev conditions with
  n1 = p1 and n2 = n - p1 - 2p2

plus the Nickelian points on the unit circle and the w -> s change of
variable 2w = s/(1+s^2).
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
import sympy
from sympy import Poly, QQ, Symbol

from singkit.core.cache import cached_artifact
from singkit.core.exceptions import DegeneracyError, InvalidInputError
from singkit.core.metrics import MetricsManager
from singkit.data import load_golden
from singkit.services.base import BaseEngine
from singkit.services.exactalg import (
    RATIONALS,
    BivariatePolynomial,
    FactoredPolynomial,
    Polynomial,
    QuotientRing,
    factor_poly,
    poly_resultant,
    squarefree_part,
)
from singkit.services.numerics import poly_roots, w_to_s_points
from singkit.services.odefit import SingularityEntry, SingularitySet

logger = logging.getLogger(__name__)

_Z = Symbol("z")
_W = Symbol("w")

CONVENTION_FACTORS = ("w",)


# ---------------------------------------------------------------------------
# Chebyshev building blocks
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _chebyshev_coeffs(kind: str, m: int) -> Tuple[int, ...]:
    if kind not in ("T", "U"):
        raise InvalidInputError(f"Unknown Chebyshev kind {kind!r}")
    if kind == "T" and m < 0:
        raise InvalidInputError("T_m needs m >= 0", details={"m": m})
    if kind == "U" and m < -1:
        raise InvalidInputError("U_m needs m >= -1", details={"m": m})
    if m == -1:
        return ()
    x = Symbol("x")
    poly = sympy.chebyshevt_poly(m, x, polys=True) if kind == "T" else sympy.chebyshevu_poly(m, x, polys=True)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def chebyshev(kind: str, m: int, var: str = "x") -> Polynomial:
    """T_m or U_m with integer coefficients; U_{-1} = 0."""
    return Polynomial(_chebyshev_coeffs(kind, m), RATIONALS, var)


def _homogenize(kind: str, m: int, P: Poly, Q: Poly, degree: int) -> Poly:
    """sum_i t_i P^i Q^(degree - i): numerator of cheb(P/Q) times Q^degree."""
    coeffs = _chebyshev_coeffs(kind, m)
    out = Poly(0, _Z, _W, domain=QQ)
    for i, t in enumerate(coeffs):
        if t:
            out += t * P ** i * Q ** (degree - i)
    return out


def _univariate(kind: str, m: int) -> Poly:
    """cheb(z) as a Poly in (z, w)."""
    coeffs = _chebyshev_coeffs(kind, m)
    return Poly(sum(t * _Z ** i for i, t in enumerate(coeffs)), _Z, _W, domain=QQ)


@lru_cache(maxsize=None)
def _cheb_pinch_numerator(k1: int, k2: int) -> Polynomial:
    if k1 < 0 or k2 < 0 or (k1, k2) == (0, 0):
        raise InvalidInputError("Pinch indices must be nonnegative and not both zero",
                                details={"k1": k1, "k2": k2})
    m = max(k1, k2)
    two_w = Polynomial((0, 2))
    plus = Polynomial((1, 2))
    minus = Polynomial((1, -2))
    out = Polynomial.zero()
    for i, t in enumerate(_chebyshev_coeffs("T", k1)):
        if t:
            out = out + (plus ** i * two_w ** (m - i)).scale(t)
    for i, t in enumerate(_chebyshev_coeffs("T", k2)):
        if t:
            out = out - (minus ** i * two_w ** (m - i)).scale(t)
    if out.is_zero:
        raise DegeneracyError("Pinch condition vanishes identically", details={"k1": k1, "k2": k2})
    return out.normalized()


def cheb_pinch_poly(k1: int, k2: int) -> FactoredPolynomial:
    """Primitive numerator of T_k1(1/(2w)+1) - T_k2(1/(2w)-1), factored."""
    return factor_poly(_cheb_pinch_numerator(k1, k2))


def family1_poly(n: int, p1: int, p2: int) -> Polynomial:
    if not (0 <= p1 <= n // 2 and 0 <= p2 <= n // 2 - p1):
        raise InvalidInputError("family 1 index out of range", details={"n": n, "p1": p1, "p2": p2})
    return _cheb_pinch_numerator(2 * p1, n - 2 * p1 - 2 * p2)


def familyY_poly(n: int, k: int) -> Polynomial:
    """The unrestricted pinch family T_k(1/2w+1) = T_{n-k}(1/2w-1); odd k allowed."""
    if not 0 <= k <= n or n < 1:
        raise InvalidInputError("familyY index out of range", details={"n": n, "k": k})
    return _cheb_pinch_numerator(k, n - k)


def crescent_family(k: int, n: int) -> Tuple[Polynomial, str]:
    """The k-th crescent condition at order n and its provenance tag.

    Even k keeps T_k on the 1/2w+1 side; odd k uses the mirrored pairing
    T_{n-k}(1/2w+1) = T_k(1/2w-1), the same orientation as annulus_radius.
    """
    if not 0 <= 2 * k <= n:
        raise InvalidInputError("crescent needs 0 <= 2k <= n", details={"n": n, "k": k})
    poly = familyY_poly(n, k) if k % 2 == 0 else familyY_poly(n, n - k)
    return poly, f"crescent({k},{n})"


# ---------------------------------------------------------------------------
# Family 2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Family2System:
    n1: int
    n2: int
    A: BivariatePolynomial
    B: BivariatePolynomial
    C: BivariatePolynomial  # zero when n1 or n2 vanishes


@dataclass(frozen=True)
class RejectedFactor:
    factor: Polynomial
    reason: str
    tag: str

    def to_json(self) -> dict:
        return {"factor": self.factor.to_json(), "reason": self.reason, "tag": self.tag}


@dataclass(frozen=True)
class Family2Result:
    accepted: Tuple[Polynomial, ...]
    rejected: Tuple[RejectedFactor, ...]
    with_c: Tuple[Polynomial, ...] = ()  # accepted factors where C vanishes too


def family2_system(n1: int, n2: int) -> Family2System:
    """Numerators of the three family-2 conditions with N = 4w - z, Dn = 1 - 4wz."""
    if n1 < 0 or n2 < 0:
        raise InvalidInputError("family 2 indices must be nonnegative", details={"n1": n1, "n2": n2})
    if n1 == n2:
        raise InvalidInputError("n1 = n2 gives the degenerate common curve; excluded",
                                details={"n1": n1, "n2": n2})
    gens = (_Z, _W)
    N = Poly(4 * _W - _Z, *gens, domain=QQ)
    Dn = Poly(1 - 4 * _W * _Z, *gens, domain=QQ)
    P1 = Poly(1 - 2 * _W * _Z, *gens, domain=QQ)
    Q1 = Poly(2 * _W, *gens, domain=QQ)
    P2 = Poly(1 - 2 * _W * _Z - 8 * _W ** 2, *gens, domain=QQ)
    Q2 = Poly(2 * _W, *gens, domain=QQ) * Dn
    two_w = Poly(2 * _W, *gens, domain=QQ)

    A = _univariate("T", n1) * Dn ** n2 - _homogenize("T", n2, N, Dn, n2)
    M = max(n1, n2)
    B = (_homogenize("T", n1, P1, Q1, n1) * two_w ** (M - n1) * Dn ** n2
         - _homogenize("T", n2, P2, Q2, n2) * two_w ** (M - n2))
    if n1 == 0 or n2 == 0:
        C = Poly(0, *gens, domain=QQ)
    else:
        d1, d2 = n1 - 1, n2 - 1
        Md = max(d1, d2)
        C = (_univariate("U", d2) * _homogenize("U", d1, P2, Q2, d1) * two_w ** (Md - d1)
             - _homogenize("U", d2, P1, Q1, d2) * two_w ** (Md - d2) * _homogenize("U", d1, N, Dn, d1))
    return Family2System(n1, n2, *(BivariatePolynomial.from_sympy(X) for X in (A, B, C)))


def _eval_k(coeffs: List[Polynomial], point: Polynomial, ring: QuotientRing) -> Polynomial:
    acc = Polynomial.zero()
    for c in reversed(coeffs):
        acc = ring.reduce(ring.mul(acc, point) + c)
    return acc


def _deflate(coeffs: List[Polynomial], point: Polynomial, ring: QuotientRing) -> List[Polynomial]:
    """Quotient of a K[z] polynomial by (z - point), assuming point is a root."""
    quotient: List[Polynomial] = []
    carry = Polynomial.zero()
    for c in reversed(coeffs[1:]):
        carry = ring.reduce(ring.mul(carry, point) + c)
        quotient.append(carry)
    return list(reversed(quotient))


def _strip_pole(system: Family2System, g: List[Polynomial], ring: QuotientRing) -> List[Polynomial]:
    """Remove the root z = 1/(4w) where Dn = 1 - 4wz vanishes."""
    # Dn only appears as a denominator through T_{n2}; with n2 = 0 the pole is a real root
    if system.n2 == 0:
        return g
    four_w = ring.reduce(Polynomial((0, 4)))
    if four_w.is_zero:
        return g
    pole = ring.inverse(four_w)
    while len(g) > 1 and _eval_k(g, pole, ring).is_zero:
        g = _deflate(g, pole, ring)
    return g


def _validate(system: Family2System, f: Polynomial) -> Tuple[Optional[str], bool]:
    """Check for a common z-root of A and B over QQ[w]/(f) away from Dn = 0.

    Returns the rejection reason (None when accepted) and whether the third
    condition C vanishes at that root too.
    """
    ring = QuotientRing(f)
    reduced = [X.reduce_in(ring) for X in (system.A, system.B)]
    reduced = [r for r in reduced if r]
    if not reduced:
        return "A and B vanish identically on the factor", False
    g = _strip_pole(system, ring.poly_gcd(reduced), ring)
    if len(g) <= 1:
        return "no common z-root of A and B away from Dn = 0", False
    if system.C.is_zero:
        return None, False
    c = system.C.reduce_in(ring)
    if not c:
        return None, True
    return None, len(_strip_pole(system, ring.poly_gcd([g, c]), ring)) > 1


def _factor_keys(p: Polynomial) -> List[Polynomial]:
    """Distinct irreducible factors of p, factoring only its squarefree part."""
    return [f for f, _ in factor_poly(squarefree_part(p)).factors]


class LandauEngine(BaseEngine):

    def family2_eliminate(self, n: int, p1: int, p2: int) -> Family2Result:
        """Eliminate z from the first two family-2 conditions.

        Candidates are the factors of Res_z(A, B) and of the w-contents of A
        and B. A candidate is accepted when A and B share a z-root over
        QQ[w]/(f) other than the pole of 1/(1 - 4wz); whether C vanishes there
        as well is recorded in ``with_c``.
        """
        if not (0 <= p1 <= n and 0 <= p2 <= (n - p1) // 2):
            raise InvalidInputError("family 2 index out of range", details={"n": n, "p1": p1, "p2": p2})
        n1, n2 = p1, n - p1 - 2 * p2
        tag = f"family2({p1},{p2})"
        with MetricsManager.timed("family2_eliminate"):
            system = family2_system(n1, n2)
            if system.A.is_zero or system.B.is_zero:
                raise DegeneracyError("family 2 system has fewer than two equations", details={"tag": tag})
            candidates: Dict[Tuple[str, ...], Polynomial] = {}
            primitive = []
            for X in (system.A, system.B):
                content, prim = X.split_content()
                if content.degree >= 1:
                    for f in _factor_keys(content):
                        candidates.setdefault(f.key(), f)
                primitive.append(prim)
            resultant = poly_resultant(*primitive)
            if resultant.is_zero:
                raise DegeneracyError("The family 2 resultant vanishes identically",
                                      details={"n": n, "p1": p1, "p2": p2})
            if resultant.degree >= 1:
                for f in _factor_keys(resultant):
                    candidates.setdefault(f.key(), f)

            accepted, with_c, rejected = [], [], []
            for key in sorted(candidates):
                f = candidates[key]
                reason, on_c = _validate(system, f)
                if reason is None:
                    accepted.append(f)
                    if on_c:
                        with_c.append(f)
                else:
                    rejected.append(RejectedFactor(f, reason, tag))
        self.log_info("Eliminated family 2", extra={"n": n, "p1": p1, "p2": p2, "accepted": len(accepted),
                                                     "with_c": len(with_c), "rejected": len(rejected)})
        return Family2Result(tuple(accepted), tuple(rejected), tuple(with_c))

    def family2_pairs(self, n: int) -> List[Tuple[int, int]]:
        pairs = []
        for p1 in range(0, n + 1):
            for p2 in range(0, (n - p1) // 2 + 1):
                if p1 != n - p1 - 2 * p2:
                    pairs.append((p1, p2))
        return pairs

    def family1_pairs(self, n: int) -> List[Tuple[int, int]]:
        return [(p1, p2) for p1 in range(0, n // 2 + 1) for p2 in range(0, n // 2 - p1 + 1)
                if (2 * p1, n - 2 * p1 - 2 * p2) != (0, 0)]

    def singularity_report(self, n: int) -> dict:
        """Accepted set plus the quarantined family-2 factors."""
        if n < 3:
            raise InvalidInputError("singularity sets start at n = 3", details={"n": n})
        entries: List[SingularityEntry] = []
        rejected: List[RejectedFactor] = []
        for p1, p2 in self.family1_pairs(n):
            tag = f"family1({p1},{p2})"
            for f, m in factor_poly(family1_poly(n, p1, p2)).factors:
                entries.append(SingularityEntry(f, 1, frozenset({tag})))
        for p1, p2 in self.family2_pairs(n):
            try:
                result = self.family2_eliminate(n, p1, p2)
            except DegeneracyError as exc:
                self.log_warning("Skipping degenerate family 2 pair",
                                 extra={"n": n, "p1": p1, "p2": p2, "reason": exc.message})
                continue
            tag = f"family2({p1},{p2})"
            on_c = {f.key() for f in result.with_c}
            entries.extend(SingularityEntry(f, 1, frozenset({tag if f.key() in on_c else tag + ":AB"}))
                           for f in result.accepted)
            rejected.extend(result.rejected)
        for text in CONVENTION_FACTORS:
            entries.append(SingularityEntry(Polynomial.parse(text), 1, frozenset({"convention"})))
        accepted = SingularitySet.build(entries)
        own = set(accepted.keys())
        quarantine = [r for r in rejected if r.factor.key() not in own]
        return {"n": n, "set": accepted, "rejected": quarantine}


_engine = LandauEngine()


def family2_eliminate(n: int, p1: int, p2: int) -> Family2Result:
    return _engine.family2_eliminate(n, p1, p2)


@cached_artifact("landau", dump=lambda s: s.to_json(), load=SingularitySet.from_json)
def singularity_set(n: int) -> SingularitySet:
    return _engine.singularity_report(n)["set"]


def singularity_report(n: int) -> dict:
    report = _engine.singularity_report(n)
    return {
        "n": n,
        "entries": report["set"].to_json()["entries"],
        "rejected": [r.to_json() for r in report["rejected"]],
    }


def embedding_check(n: int, m: int) -> List[Polynomial]:
    """Factors of singularity_set(n) that are absent from singularity_set(m)."""
    target = set(singularity_set(m).keys())
    return [f for f in singularity_set(n).factors() if f.key() not in target]


def golden_diff(n: int) -> dict:
    """Compare singularity_set(n) with the shipped reference lists.

    n <= 6 is an exact set comparison; n = 7, 8 only require containment of the
    polynomials found by series recognition and of the Landau-only additions.
    """
    golden = load_golden("singularities")
    key = str(n)
    if key in golden["ode"]:
        expected = [Polynomial.parse(t) for t in golden["ode"][key]]
        mode = "equal"
    elif key in golden["recognized"]:
        expected = [Polynomial.parse(t) for t in golden["recognized"][key] + golden["landau_only"][key]]
        mode = "contains"
    else:
        raise InvalidInputError(f"No reference singularity list for n = {n}",
                                details={"known": sorted(int(k) for k in {**golden["ode"], **golden["recognized"]})})
    found = singularity_set(n)
    missing = [str(p) for p in found.missing(expected)]
    expected_keys = {p.normalized().key() for p in expected}
    extra = [str(f) for f in found.factors() if f.key() not in expected_keys] if mode == "equal" else []
    return {"n": n, "mode": mode, "missing": missing, "extra": extra, "passed": not missing and not extra}


# ---------------------------------------------------------------------------
# s-plane
# ---------------------------------------------------------------------------

def w_poly_to_s_poly(p: Polynomial) -> FactoredPolynomial:
    """Substitute w = s/(2(1+s^2)) and clear (2(1+s^2))^deg."""
    if p.is_zero:
        raise InvalidInputError("Cannot map the zero polynomial")
    d = int(p.degree)
    s = Polynomial((0, 1), RATIONALS, "s")
    denominator = Polynomial((2, 0, 2), RATIONALS, "s")
    out = Polynomial.zero(RATIONALS, "s")
    for i, c in enumerate(p.coeffs):
        if c:
            out = out + (s ** i * denominator ** (d - i)).scale(c)
    return factor_poly(out.normalized())


def nickelian_points(n: int) -> List[complex]:
    """Solutions of 2(s + 1/s) = u^k + 1/u^k + u^m + 1/u^m with u^(2n+1) = 1, deduplicated."""
    if n < 0:
        raise InvalidInputError("nickelian_points needs n >= 0", details={"n": n})
    idx = np.arange(-n, n + 1)
    angles = 2 * np.pi * idx / (2 * n + 1)
    rhs = (2 * np.cos(angles)[:, None] + 2 * np.cos(angles)[None, :]).ravel()
    disc = np.sqrt(rhs.astype(complex) ** 2 - 16)
    roots = np.concatenate([(rhs + disc) / 4, (rhs - disc) / 4])
    seen = {}
    for z in roots:
        key = (round(z.real, 10) + 0.0, round(z.imag, 10) + 0.0)
        seen.setdefault(key, complex(z))
    return [seen[k] for k in sorted(seen, key=lambda k: (math.atan2(k[1], k[0]), k))]


def annulus_radius(k: int) -> float:
    """Largest |s| of the defining condition at n = 2k+1.

    Even k: family 1 with 2p1 = k, p2 = 0, i.e. T_k(1/2w+1) = T_{k+1}(1/2w-1).
    Odd k: the swapped pair T_{k+1}(1/2w+1) = T_k(1/2w-1).
    """
    if k < 0:
        raise InvalidInputError("annulus index must be nonnegative", details={"k": k})
    poly = _cheb_pinch_numerator(k, k + 1) if k % 2 == 0 else _cheb_pinch_numerator(k + 1, k)
    radius = 0.0
    for point in poly_roots(poly):
        if abs(point.value) == 0:
            continue
        s1, s2 = w_to_s_points(point.value)
        radius = max(radius, abs(s1), abs(s2))
    return radius
