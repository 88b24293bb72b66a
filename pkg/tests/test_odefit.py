import pytest

from singkit.core.exceptions import (
    DomainMismatchError,
    FeatureGateError,
    InsufficientTermsError,
    InvalidInputError,
    NotSingularError,
)
from singkit.services.exactalg import RATIONALS, Polynomial
from singkit.services.odefit import (
    DiffOperator,
    apply_operator,
    classify_singularities,
    fit_operators,
    format_operator,
    gcrd,
    golden_operator,
    head_singularities,
    indicial_polynomial,
    integer_exponents,
    minimal_operator,
    multiply,
    operator_mod_p,
    phiH3_profile,
    phiH4_profile,
    right_divides,
    series_mod_p,
)
from singkit.services.seriesgen import change_variable, closed_form_series, phiH_series


def op(*coeffs: str, var: str = "w") -> DiffOperator:
    return DiffOperator(tuple(Polynomial.parse(c, var=var) for c in coeffs), RATIONALS, "w")


# (1-4w) D - 4 annihilates 1/(1-4w)
GEOMETRIC = op("-4", "1-4*w")


def test_operator_is_stored_in_primitive_normal_form():
    assert op("-8", "2-8*w") == GEOMETRIC
    assert op("4", "-1+4*w") == GEOMETRIC


def test_zero_operator_is_rejected():
    with pytest.raises(InvalidInputError):
        op("0", "0")


def test_apply_operator_residual_vanishes():
    residual = apply_operator(GEOMETRIC, closed_form_series("phiH1", 30))
    assert residual.order == 29
    assert residual.is_zero()


def test_apply_operator_checks_variables():
    s = change_variable(closed_form_series("phiH2", 21), "x=16w2")
    with pytest.raises(DomainMismatchError):
        apply_operator(GEOMETRIC, s)


def test_apply_operator_needs_more_terms_than_the_order():
    with pytest.raises(InsufficientTermsError):
        apply_operator(GEOMETRIC, closed_form_series("phiH1", 1))


def test_fit_recovers_first_order_operator():
    basis = fit_operators(closed_form_series("phiH1", 30), order=1, degree=1)
    assert basis == [GEOMETRIC]


def test_fit_over_prime_field_matches_reduction(prime, prime_field):
    s = series_mod_p(closed_form_series("phiH1", 30), prime)
    basis = fit_operators(s, order=1, degree=1)
    assert basis == [operator_mod_p(GEOMETRIC, prime)]
    assert basis[0].field == prime_field


def test_fit_budget_is_checked():
    with pytest.raises(InsufficientTermsError):
        fit_operators(closed_form_series("phiH1", 10), order=3, degree=5)


def test_large_orders_need_the_stretch_gate():
    with pytest.raises(FeatureGateError) as exc:
        fit_operators(closed_form_series("phiH1", 40), order=17, degree=0)
    assert exc.value.details["limit"] == 16


def test_fit_ansatz_must_share_the_series_variable():
    with pytest.raises(DomainMismatchError):
        fit_operators(closed_form_series("phiH1", 200), order=6, degree=0, ansatz=phiH4_profile())


def test_minimal_operator_reduces_basis_by_gcrd():
    L = minimal_operator(closed_form_series("phiH1", 30), max_order=3, max_degree=3)
    assert L == GEOMETRIC


def test_minimal_operator_of_phiH2_has_order_two():
    L = minimal_operator(phiH_series(2, 60), max_order=3, max_degree=10)
    assert L.order == 2
    assert apply_operator(L, phiH_series(2, 60)).is_zero()


def test_minimal_operator_reports_exhausted_shapes():
    with pytest.raises(InsufficientTermsError) as exc:
        minimal_operator(phiH_series(2, 20), max_order=1, max_degree=2)
    assert exc.value.details["shapes_tried"] == [[1, 2]]


def test_multiply_and_right_division():
    left = op("w", "1")
    product = multiply(left, GEOMETRIC)
    assert product.order == 2
    assert right_divides(GEOMETRIC, product)
    assert not right_divides(op("0", "1"), GEOMETRIC)


def test_gcrd_recovers_planted_right_factor():
    A = multiply(op("w", "1"), GEOMETRIC)
    B = multiply(op("1", "1-w", "w"), GEOMETRIC)
    assert gcrd(A, B) == GEOMETRIC


def test_indicial_polynomial_of_euler_operator():
    L = op("-2", "w")
    rho = indicial_polynomial(L, Polynomial.parse("w"))
    assert integer_exponents(rho) == [2]


def test_indicial_polynomial_needs_a_singular_point():
    with pytest.raises(NotSingularError):
        indicial_polynomial(GEOMETRIC, Polynomial.parse("1-w"))


def test_indicial_polynomial_at_infinity():
    # w D - 2: solutions w^2, i.e. w^(-rho) with rho = -2
    rho = indicial_polynomial(op("-2", "w"), "inf")
    assert integer_exponents(rho) == [-2]


def test_head_singularities_of_geometric_operator():
    assert head_singularities(GEOMETRIC).keys() == [Polynomial.parse("1-4*w").key()]


def test_golden_operators_load(golden):
    L3 = golden_operator("phiH3")
    L4 = golden_operator("phiH4")
    assert L3.order == 5 and L3.variable == "w"
    assert L4.order == 6 and L4.variable == "x=16w2"
    ode3 = [Polynomial.parse(t) for t in golden("singularities")["ode"]["3"]]
    assert not head_singularities(L3).missing(ode3)


def test_golden_operator_unknown_name():
    with pytest.raises(InvalidInputError):
        golden_operator("phiH9")


def test_phiH3_profile_fits_in_160_terms():
    profile = phiH3_profile()
    assert profile.order == 5
    assert profile.unknowns + 10 + profile.order <= 160


def test_format_operator_lists_head_first():
    text = format_operator(GEOMETRIC)
    assert text.splitlines()[0].startswith("a1(w) = ")


def test_classify_singularities_keeps_head_factors():
    result = classify_singularities(golden_operator("phiH3"))
    assert result.contains(Polynomial.parse("(1-4*w)*(1+3*w+4*w**2)"))


@pytest.mark.slow
def test_phiH3_operator_from_160_terms():
    basis = fit_operators(phiH_series(3, 160), 5, 0, ansatz=phiH3_profile())
    assert basis == [golden_operator("phiH3")]


@pytest.mark.slow
def test_phiH3_operator_mod_p(prime):
    s = series_mod_p(phiH_series(3, 160), prime)
    basis = fit_operators(s, 5, 0, ansatz=phiH3_profile())
    assert basis == [operator_mod_p(golden_operator("phiH3"), prime)]


@pytest.mark.slow
def test_phiH4_operator_from_x_series():
    s = change_variable(phiH_series(4, 180), "x=16w2")
    basis = fit_operators(s, 6, 0, ansatz=phiH4_profile())
    assert basis == [golden_operator("phiH4")]
