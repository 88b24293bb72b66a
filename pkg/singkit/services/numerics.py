"""
Floating-Point Support

Complex root finding (Aberth-Ehrlich), AGM-based complete elliptic
integrals, the w <-> s maps, crescent point clouds with CSV/SVG export, and
the quadrature oracles that cross-check the exact series engines.

Everything here is double precision (mpmath only drives the quadrature);
exact claims never depend on this module.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from singkit.core.config import settings
from singkit.core.exceptions import ConvergenceError, InvalidInputError
from singkit.services.base import BaseEngine
from singkit.services.exactalg import Polynomial, factor_poly

logger = logging.getLogger(__name__)

POINT_COLUMNS = ("re", "im", "n", "family", "p1", "p2", "k")
AXIS_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ComplexPoint:
    re: float
    im: float
    multiplicity: int = 1
    tags: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise InvalidInputError("Non-finite point", details={"re": self.re, "im": self.im})

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def tag(self, key: str, default: str = "") -> str:
        return dict(self.tags).get(key, default)

    def with_tags(self, **items) -> "ComplexPoint":
        merged = dict(self.tags)
        merged.update({k: str(v) for k, v in items.items()})
        return ComplexPoint(self.re, self.im, self.multiplicity, tuple(sorted(merged.items())))


# ---------------------------------------------------------------------------
# Roots
# ---------------------------------------------------------------------------

def _aberth(coeffs_high_first: np.ndarray, max_iter: int) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration for a squarefree polynomial."""
    a = coeffs_high_first / coeffs_high_first[0]
    degree = len(a) - 1
    if degree == 1:
        return np.array([-a[1]], dtype=complex)
    deriv = np.polyder(a)
    # Fujiwara bound for the initial circle; fixed rotation keeps runs deterministic
    radius = 2 * max(abs(a[i]) ** (1.0 / i) for i in range(1, degree + 1))
    angles = 2 * np.pi * np.arange(degree) / degree + 0.4
    z = radius * 0.5 * np.exp(1j * angles)
    for _ in range(max_iter):
        ratio = np.polyval(a, z) / np.polyval(deriv, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        correction = ratio / (1 - ratio * inv.sum(axis=1))
        z = z - correction
        if np.all(np.abs(correction) <= 1e-15 * np.maximum(1.0, np.abs(z))):
            break
    residual = np.abs(np.polyval(a, z) / np.polyval(deriv, z))
    if not np.all(residual < 1e-12 * np.maximum(1.0, np.abs(z)) * max(1.0, degree)):
        raise ConvergenceError("Aberth iteration did not reach the residual threshold",
                               details={"degree": degree, "max_residual": float(residual.max())})
    return z


def poly_roots(p: Polynomial, max_iter: Optional[int] = None) -> List[ComplexPoint]:
    """All complex roots, found per irreducible factor; repeated factors carry their multiplicity."""
    if p.is_zero or p.degree < 1:
        raise InvalidInputError("poly_roots needs degree >= 1")
    max_iter = max_iter or settings.aberth_max_iter
    if p.degree > settings.root_precision_warning_degree:
        logger.warning("Double precision root finding on a high-degree polynomial",
                       extra={"degree": int(p.degree)})
    points = []
    for f, mult in factor_poly(p).factors:
        coeffs = np.array([float(f.field.to_fraction(c)) for c in reversed(f.coeffs)], dtype=complex)
        for z in _aberth(coeffs, max_iter):
            points.append(ComplexPoint(float(z.real), float(z.imag), mult,
                                       (("factor", str(f)),) if mult > 1 else ()))
    return points


# ---------------------------------------------------------------------------
# Elliptic integrals and the s variable
# ---------------------------------------------------------------------------

def agm(a: complex, b: complex) -> complex:
    return complex(mpmath.agm(a, b))


def agm_elliptic_K(m: complex) -> complex:
    """K(m) = pi / (2 AGM(1, sqrt(1 - m))), parameter convention."""
    if m == 1:
        raise ConvergenceError("K(m) diverges at m = 1")
    root = complex(mpmath.sqrt(1 - mpmath.mpc(m)))
    if root.real < 0:
        root = -root
    mean = agm(1, root)
    if mean == 0:
        raise ConvergenceError("AGM vanished", details={"m": str(m)})
    return math.pi / (2 * mean)


def w_to_s_points(w: complex) -> Tuple[complex, complex]:
    """The two roots of 2w s^2 - s + 2w = 0 (mutual inverses)."""
    if w == 0:
        raise InvalidInputError("w = 0 maps to s in {0, infinity}")
    w = complex(w)
    disc = np.sqrt(complex(1 - 16 * w * w))
    return complex((1 + disc) / (4 * w)), complex((1 - disc) / (4 * w))


def s_to_w(s: complex) -> complex:
    return complex(s / (2 * (1 + s * s)))


# ---------------------------------------------------------------------------
# Point clouds
# ---------------------------------------------------------------------------

def _admissible_orders(k: int, n_max: int, parity: str) -> List[int]:
    if parity not in ("odd", "even", "all"):
        raise InvalidInputError(f"Unknown parity {parity!r}")
    orders = []
    for n in range(max(2 * k, 1), n_max + 1):
        if parity == "odd" and n % 2 == 0 or parity == "even" and n % 2 == 1:
            continue
        orders.append(n)
    return orders


def polynomial_s_points(poly: Polynomial, **tags) -> List[ComplexPoint]:
    points = []
    for root in poly_roots(poly):
        if root.value == 0:
            continue
        for s in w_to_s_points(root.value):
            points.append(ComplexPoint(s.real, s.imag, root.multiplicity).with_tags(**tags))
    return points


def crescent_points(k: int, n_max: int, parity: str = "odd",
                    include_swapped: bool = False) -> List[ComplexPoint]:
    """s-plane images of the k-th crescent condition for every admissible n (2k <= n <= n_max).

    With include_swapped the mirrored pairing is added as well; for even k and
    even n the union is invariant under s -> -s.
    """
    from singkit.services.landau import crescent_family, familyY_poly

    if k < 0:
        raise InvalidInputError("crescent index must be nonnegative", details={"k": k})
    points = []
    for n in _admissible_orders(k, n_max, parity):
        poly, _ = crescent_family(k, n)
        points.extend(polynomial_s_points(poly, n=n, family="crescent", k=k))
        if include_swapped and n - k != k:
            mirrored = familyY_poly(n, n - k) if k % 2 == 0 else familyY_poly(n, k)
            points.extend(polynomial_s_points(mirrored, n=n, family="crescent-swapped", k=k))
    return points


def split_half_planes(points: Iterable[ComplexPoint], tol: float = AXIS_TOLERANCE) -> Dict[str, List[ComplexPoint]]:
    """Partition into right / left half-plane points and quarantined near-axis points."""
    out = {"right": [], "left": [], "axis": []}
    for p in points:
        if abs(p.re) <= tol:
            out["axis"].append(p)
        elif p.re > 0:
            out["right"].append(p)
        else:
            out["left"].append(p)
    return out


def is_symmetric(points: Sequence[ComplexPoint], transform=lambda z: -z, tol: float = 1e-9) -> bool:
    """True when every point's image under transform matches some point of the cloud."""
    values = np.array([p.value for p in points])
    if values.size == 0:
        return True
    for z in values:
        if np.min(np.abs(values - transform(z))) > tol * max(1.0, abs(z)):
            return False
    return True


def points_to_csv(points: Iterable[ComplexPoint]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(POINT_COLUMNS)
    for p in points:
        writer.writerow([f"{p.re:.17g}", f"{p.im:.17g}", p.tag("n"), p.tag("family"),
                         p.tag("p1"), p.tag("p2"), p.tag("k")])
    return buffer.getvalue()


def points_to_svg(points: Iterable[ComplexPoint], size: int = 800) -> str:
    """Fixed -2..2 viewBox in the s-plane with the unit circle drawn."""
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="-2 -2 4 4">',
        '<rect x="-2" y="-2" width="4" height="4" fill="white"/>',
        '<circle cx="0" cy="0" r="1" fill="none" stroke="#888888" stroke-width="0.005"/>',
    ]
    radius = 1.5 * 4 / size / 2
    for p in points:
        if abs(p.re) > 2 or abs(p.im) > 2:
            continue
        lines.append(f'<circle cx="{p.re:.6f}" cy="{-p.im:.6f}" r="{radius:.6f}" fill="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def annulus_profile(k_max: int) -> dict:
    """Annulus radii for k <= k_max, gaps per parity and a fitted gap-decay exponent."""
    from singkit.services.landau import annulus_radius

    radii = [annulus_radius(k) for k in range(k_max + 1)]
    profile = {"radii": radii}
    for parity, start in (("even", 0), ("odd", 1)):
        seq = radii[start::2]
        gaps = [b - a for a, b in zip(seq, seq[1:])]
        profile[f"{parity}_gaps"] = gaps
        positive = [(i + 1, g) for i, g in enumerate(gaps) if g > 0]
        if len(positive) >= 3:
            xs = np.log([i for i, _ in positive])
            ys = np.log([g for _, g in positive])
            slope, _ = np.polyfit(xs, ys, 1)
            profile[f"{parity}_decay_exponent"] = float(-slope)
    return profile


# ---------------------------------------------------------------------------
# Quadrature oracles
# ---------------------------------------------------------------------------

def _xy(w, phi):
    c = 1 - 2 * w * mpmath.cos(phi)
    root = mpmath.sqrt(c * c - 4 * w * w)
    return 2 * w / (c + root), 1 / root


class QuadratureOracle(BaseEngine):
    """Direct angular integration of the defining integrals."""

    def phiH(self, n: int, w: float, tol: float = 1e-10) -> float:
        if n not in (1, 2, 3):
            raise InvalidInputError("The phiH oracle handles n in {1, 2, 3}", details={"n": n})
        _check_w(w)
        w = mpmath.mpf(w)
        two_pi = 2 * mpmath.pi

        def kernel(phis):
            last = -sum(phis)
            prod_x, prod_y = mpmath.mpf(1), mpmath.mpf(1)
            for phi in list(phis) + [last]:
                x, y = _xy(w, phi)
                prod_x *= x
                prod_y *= y
            return prod_y * (1 + prod_x) / (1 - prod_x)

        with mpmath.workdps(_working_dps(tol)):
            if n == 1:
                x, y = _xy(w, 0)
                value = y * (1 + x) / (1 - x)
            elif n == 2:
                value = mpmath.quad(lambda a: kernel([a]), [0, mpmath.pi, two_pi]) / two_pi
            else:
                value = mpmath.quad(lambda a, b: kernel([a, b]),
                                    [0, mpmath.pi, two_pi], [0, mpmath.pi, two_pi]) / two_pi ** 2
        return float(value / math.factorial(n))

    def phiK(self, n: int, k: int, j: int, w: float, tol: float = 1e-10) -> float:
        """<1/(1 - x(phi)^(n-k) x(phi_n)^k)> over phi in [0, 2 pi], phi_n = -((n-k)/k) phi + 2 pi j / k."""
        if not 1 <= k <= n // 2 or not 0 <= j < k:
            raise InvalidInputError("phiK oracle index out of range", details={"n": n, "k": k, "j": j})
        _check_w(w)
        w = mpmath.mpf(w)
        two_pi = 2 * mpmath.pi

        def integrand(phi):
            phi_n = -mpmath.mpf(n - k) / k * phi + two_pi * j / k
            x1, _ = _xy(w, phi)
            x2, _ = _xy(w, phi_n)
            return 1 / (1 - x1 ** (n - k) * x2 ** k)

        nodes = [two_pi * i / (2 * k) for i in range(2 * k + 1)]
        with mpmath.workdps(_working_dps(tol)):
            value = mpmath.quad(integrand, nodes) / two_pi
        return float(value)


def _check_w(w: float):
    if not abs(w) < 0.25 - 1e-3:
        raise InvalidInputError("Quadrature needs |w| < 1/4 - margin", details={"w": w})


_oracle = QuadratureOracle()


def quad_oracle(model: str, w: float, tol: float = 1e-10, **params) -> float:
    """model "phiH" with n, or "phiK" with n, k, j."""
    if tol < 1e-10:
        raise InvalidInputError("quad_oracle tolerance must be >= 1e-10")
    if model == "phiH":
        return _oracle.phiH(int(params["n"]), w, tol)
    if model == "phiK":
        return _oracle.phiK(int(params["n"]), int(params["k"]), int(params.get("j", 0)), w, tol)
    raise InvalidInputError(f"Unknown oracle model {model!r}")


def phiH2_closed_form(w: float) -> float:
    """(1/2)(1-16w^2)^(-1) 2F1(1/2,-1/2;1;16w^2)."""
    z = 16 * w * w
    return float(mpmath.hyp2f1(0.5, -0.5, 1, z) / (2 * (1 - z)))


def _working_dps(tol: float) -> int:
    return max(15, int(-math.log10(tol)) + 5)
