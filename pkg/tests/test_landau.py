import math

import pytest

from singkit.core.exceptions import DegeneracyError, InvalidInputError
from singkit.services.exactalg import Polynomial, factor_poly
from singkit.services.landau import (
    LandauEngine,
    annulus_radius,
    cheb_pinch_poly,
    chebyshev,
    crescent_family,
    embedding_check,
    family1_poly,
    family2_eliminate,
    familyY_poly,
    golden_diff,
    nickelian_points,
    singularity_report,
    singularity_set,
    w_poly_to_s_poly,
)


def test_chebyshev_polynomials():
    assert chebyshev("T", 3) == Polynomial.parse("4*x**3 - 3*x", var="x")
    assert chebyshev("U", 2) == Polynomial.parse("4*x**2 - 1", var="x")
    assert chebyshev("U", -1).is_zero


def test_chebyshev_rejects_bad_index():
    with pytest.raises(InvalidInputError):
        chebyshev("T", -1)
    with pytest.raises(InvalidInputError):
        chebyshev("V", 2)


def test_pinch_of_two_and_one_is_the_quadratic():
    assert cheb_pinch_poly(2, 1).expand() == Polynomial.parse("1+3*w+4*w**2")


def test_pinch_rejects_zero_pair():
    with pytest.raises(InvalidInputError):
        cheb_pinch_poly(0, 0)


def test_family1_at_order_three():
    # 4w^3 - 9w^2 + 6w - 1 = (w-1)^2 (4w-1)
    result = factor_poly(family1_poly(3, 0, 0))
    assert result.multiplicity(Polynomial.parse("1-w")) == 2
    assert result.multiplicity(Polynomial.parse("1-4*w")) == 1


def test_family1_index_range():
    with pytest.raises(InvalidInputError):
        family1_poly(3, 2, 0)


def test_familyY_index_range():
    with pytest.raises(InvalidInputError):
        familyY_poly(4, 5)


def test_crescent_family_orientation():
    even, tag = crescent_family(2, 5)
    assert even == familyY_poly(5, 2)
    assert tag == "crescent(2,5)"
    odd, _ = crescent_family(1, 3)
    assert odd == familyY_poly(3, 2)
    with pytest.raises(InvalidInputError):
        crescent_family(3, 5)


@pytest.mark.parametrize("n", [3, 4])
def test_singularity_set_matches_reference(n):
    diff = golden_diff(n)
    assert diff["mode"] == "equal"
    assert diff["missing"] == [] and diff["extra"] == []
    assert diff["passed"]


@pytest.mark.slow
@pytest.mark.parametrize("n", [5, 6])
def test_singularity_set_matches_reference_slow(n):
    assert golden_diff(n)["passed"]


@pytest.mark.slow
@pytest.mark.parametrize("n", [7, 8])
def test_recognized_polynomials_are_predicted(n):
    diff = golden_diff(n)
    assert diff["mode"] == "contains"
    assert diff["missing"] == []


def test_golden_diff_without_reference():
    with pytest.raises(InvalidInputError):
        golden_diff(11)


def test_singularity_set_carries_convention_factors():
    found = singularity_set(3)
    assert found.contains(Polynomial.parse("w*(1-4*w)*(1+4*w)"))
    assert "convention" in next(e.tags for e in found.entries if e.factor == Polynomial.parse("w"))


def test_singularity_report_is_json_ready():
    report = singularity_report(3)
    assert report["n"] == 3
    assert all("factor" in e and "tags" in e for e in report["entries"])
    assert isinstance(report["rejected"], list)


def test_embedding_reports_factors_missing_at_other_parity():
    lost = {str(f) for f in embedding_check(3, 4)}
    assert lost == {"1-w", "1+3*w+4*w^2"}


@pytest.mark.slow
def test_odd_orders_embed_two_steps_up():
    assert embedding_check(3, 5) == []


def test_w_to_s_of_the_quadratic():
    result = w_poly_to_s_poly(Polynomial.parse("1+3*w+4*w**2"))
    assert result.multiplicity(Polynomial.parse("s**2+s+2", var="s")) == 1
    assert result.multiplicity(Polynomial.parse("2*s**2+s+1", var="s")) == 1


def test_w_to_s_double_root_at_one():
    result = w_poly_to_s_poly(Polynomial.parse("1-4*w"))
    assert result.multiplicity(Polynomial.parse("1-s", var="s")) == 2


def test_nickelian_points_lie_on_the_unit_circle():
    points = nickelian_points(3)
    assert points
    assert max(abs(abs(s) - 1) for s in points) < 1e-10
    assert nickelian_points(0) == [1 + 0j]


def test_annulus_radii():
    assert annulus_radius(0) == pytest.approx(1.0, abs=1e-12)
    assert annulus_radius(1) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert annulus_radius(2) == pytest.approx(2.79, abs=0.01)


def test_family2_contributes_the_linear_factor_at_three():
    found = {}
    for p1, p2 in LandauEngine().family2_pairs(3):
        try:
            accepted = family2_eliminate(3, p1, p2).accepted
        except DegeneracyError:
            continue
        found.update((f.key(), f) for f in accepted)
    assert Polynomial.parse("1+2*w").key() in found
    assert set(found) <= set(singularity_set(3).keys())


def test_family2_rejects_equal_indices_and_bad_ranges():
    with pytest.raises(InvalidInputError):
        family2_eliminate(4, 1, 1)
    with pytest.raises(InvalidInputError):
        family2_eliminate(3, 1, 2)


def test_family2_keeps_the_pole_root_when_n2_is_zero():
    # (p1, p2) = (3, 0) has n2 = 0: w = -1/2, z = -1/2 solves both conditions
    result = family2_eliminate(3, 3, 0)
    assert Polynomial.parse("1+2*w").key() in {f.key() for f in result.accepted}
    assert Polynomial.parse("1+2*w").key() not in {r.factor.key() for r in result.rejected}


@pytest.mark.parametrize("n, p1, factor", [
    (5, 2, "1+4*w+8*w**2"),
    (5, 3, "1+4*w+8*w**2"),
    (5, 1, "1-w-3*w**2+4*w**3"),
    (6, 1, "1-10*w**2+29*w**4"),
])
def test_family2_accepts_common_roots_of_the_first_two_conditions(n, p1, factor):
    accepted = {f.key() for f in family2_eliminate(n, p1, 0).accepted}
    assert Polynomial.parse(factor).key() in accepted


def test_singularity_set_at_three_lists_the_family2_extras():
    found = singularity_set(3)
    for text in ("w", "1+4*w", "1+2*w"):
        assert any(t.startswith("family2(") for t in found.tags_of(Polynomial.parse(text)))


def test_only_w_is_added_by_convention():
    found = singularity_set(3)
    assert "convention" not in found.tags_of(Polynomial.parse("1+4*w"))
    assert "convention" not in found.tags_of(Polynomial.parse("1-4*w"))
    assert "family1(0,0)" in found.tags_of(Polynomial.parse("1-4*w"))
    assert any(t.startswith("family1(") for t in singularity_set(4).tags_of(Polynomial.parse("1+4*w")))


# Properties across orders. Sets up to n = 14 take minutes, so they are computed once.

_sets = {}


def _set(n):
    if n not in _sets:
        _sets[n] = singularity_set(n)
    return _sets[n]


def _factor_keys(n):
    return set(_set(n).keys())


@pytest.mark.slow
@pytest.mark.parametrize("n", range(3, 13))
def test_squarefree_part_divides_two_orders_up(n):
    assert _factor_keys(n) <= _factor_keys(n + 2)


@pytest.mark.slow
@pytest.mark.parametrize("n", range(3, 13))
def test_cm_quadratic_at_every_order_but_four(n):
    quadratic = Polynomial.parse("1+3*w+4*w**2").key()
    assert (quadratic in _factor_keys(n)) == (n != 4)


@pytest.mark.slow
@pytest.mark.parametrize("n", range(4, 13, 2))
def test_even_orders_are_closed_under_reflection(n):
    found = _set(n)
    assert {f.reflect().normalized().key() for f in found.factors()} == _factor_keys(n)


def test_order_three_is_not_closed_under_reflection():
    keys = set(singularity_set(3).keys())
    assert Polynomial.parse("1+2*w").key() in keys
    assert Polynomial.parse("1-2*w").key() not in keys


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 5, 7])
def test_odd_factors_reach_every_later_order_but_the_first_even_ones(n):
    # the first (n-1)/2 even orders above n may miss them
    for m in range(n + 1, 15):
        if m % 2 == 0 and m < 2 * n:
            continue
        assert _factor_keys(n) <= _factor_keys(m), m


@pytest.mark.slow
@pytest.mark.parametrize("n", range(3, 9))
def test_small_factor_memberships(n):
    keys = _factor_keys(n)
    assert Polynomial.parse("1+2*w").key() in keys
    assert (Polynomial.parse("1-w").key() in keys) == (n != 4)
    if n % 2 == 0:
        assert Polynomial.parse("1-2*w").key() in keys
    if n >= 5:
        assert Polynomial.parse("1+w").key() in keys
