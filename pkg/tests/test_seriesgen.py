import pytest
from fractions import Fraction

from singkit.core.exceptions import FeatureGateError, InvalidInputError
from singkit.services.exactalg import RATIONALS
from singkit.services.numerics import quad_oracle
from singkit.services.seriesgen import (
    TruncatedSeries,
    change_variable,
    closed_form_series,
    fourier_weight,
    hyp_a,
    hyp_b,
    phiD_affine,
    phiH_series,
    phiK_numeric,
    phiK_series,
    sorokin_series,
)


def _fractions(s: TruncatedSeries):
    return [s.field.to_fraction(c) for c in s.coeffs]


def test_phiH1_matches_geometric_closed_form():
    assert phiH_series(1, 100).coeffs == closed_form_series("phiH1", 100).coeffs


def test_phiH2_matches_hypergeometric_closed_form(golden):
    s = phiH_series(2, 100)
    assert s.coeffs == closed_form_series("phiH2", 100).coeffs
    assert _fractions(s)[:3] == [Fraction(t) for t in golden("series")["phiH2"]["leading"]]


def test_phiH_constant_term_is_inverse_factorial():
    assert _fractions(phiH_series(3, 8))[0] == Fraction(1, 6)
    assert _fractions(phiH_series(5, 8))[0] == Fraction(1, 120)


def test_phiH_reduces_consistently_mod_p(prime_field):
    exact = phiH_series(3, 40)
    assert phiH_series(3, 40, prime_field).coeffs == exact.over(prime_field).coeffs


def test_phiH_rejects_too_small_prime_field():
    from singkit.services.exactalg import Field

    with pytest.raises(InvalidInputError):
        phiH_series(5, 10, Field.mod(5))


def test_phi2_of_6_reproduces_the_plus_series(golden):
    expected = [Fraction(c) for c in golden("series")["phi2_6"]["coeffs_plus"]]
    s = phiK_series(6, 2, 0, len(expected))
    assert _fractions(s) == expected


def test_phi2_of_6_minus_series_is_the_reflection():
    plus = phiK_series(6, 2, 0, 20)
    minus = phiK_series(6, 2, 1, 20)
    assert minus.coeffs == plus.reflect().coeffs


def test_prefactor_variants_coincide_for_k_two():
    for p1 in range(4):
        for p2 in range(4):
            assert fourier_weight(5, 2, 0, p1, p2, "direct") == fourier_weight(5, 2, 0, p1, p2, "printed")


def test_phiK_index_checks():
    with pytest.raises(InvalidInputError):
        phiK_series(6, 4, 0, 10)
    with pytest.raises(InvalidInputError):
        phiK_series(6, 2, 2, 10)
    with pytest.raises(InvalidInputError):
        phiK_series(6, 2, 0, 10, variant="halfway")


def test_phiK_with_k_three_is_gated():
    with pytest.raises(FeatureGateError):
        phiK_series(7, 3, 0, 10, allow_cyclotomic=False)


def test_change_variable_to_x_and_back():
    s = closed_form_series("phiH2", 21)
    x = change_variable(s, "x=16w2")
    assert x.order == 11
    assert x.variable == "x=16w2"
    assert change_variable(x, "w").coeffs == s.coeffs


def test_change_variable_rejects_odd_terms():
    with pytest.raises(InvalidInputError):
        change_variable(closed_form_series("phiH1", 10), "x=w2")


def test_phiD_affine_constant_term():
    s = phiD_affine(phiK_series(6, 2, 0, 10), 6)
    assert _fractions(s)[0] == Fraction(1, 720)
    assert _fractions(s)[6] == Fraction(2, 720)


def test_series_json_round_trip_keeps_metadata():
    s = phiK_series(6, 2, 0, 12)
    back = TruncatedSeries.from_json(s.to_json())
    assert back == s


def test_sorokin_series_splits_over_one_and_zeta2():
    pair = sorokin_series(2, 12)
    assert pair.leading_exponent == 3
    for part in (pair.rational, pair.zeta2):
        assert part.variable == "x"
        assert all(c == 0 for c in part.coeffs[:3])
    assert any(pair.zeta2.coeffs)


def test_sorokin_series_needs_positive_n():
    with pytest.raises(InvalidInputError):
        sorokin_series(0, 10)


def test_series_evaluate_matches_closed_form_value():
    s = closed_form_series("phiH1", 60)
    assert s.evaluate(0.05) == pytest.approx(1 / (1 - 0.2), rel=1e-12)


@pytest.mark.slow
def test_quadrature_oracle_prefers_direct_prefactor():
    w = 0.2
    oracle = quad_oracle("phiK", w, n=7, k=3, j=0)
    direct = phiK_numeric(7, 3, 0, w, order=100, variant="direct")
    printed = phiK_numeric(7, 3, 0, w, order=100, variant="printed")
    assert abs(oracle - direct) < abs(oracle - printed)


def test_hyp_a_by_term_ratio():
    assert _fractions(hyp_a(0, 0, 6)) == [1, 0, 4, 0, 36, 0]
    assert _fractions(hyp_a(1, 0, 4))[2] == 9
    assert _fractions(hyp_a(2, 3, 1)) == [10]


def test_hyp_b_constant_terms():
    assert _fractions(hyp_b(0, 1, 1)) == [1]
    assert _fractions(hyp_b(1, 2, 1)) == [2]
    assert all(c == 0 for c in _fractions(hyp_b(1, 2, 9))[1::2])


def test_hyp_index_checks():
    with pytest.raises(InvalidInputError):
        hyp_a(-1, 0, 4)
    with pytest.raises(InvalidInputError):
        hyp_b(0, 1, 0)
