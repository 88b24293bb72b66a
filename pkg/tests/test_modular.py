import math
from fractions import Fraction

import pytest
from sympy import Poly, Symbol

from singkit.core.exceptions import DomainMismatchError, InvalidInputError
from singkit.services.exactalg import Polynomial
from singkit.services.modular import (
    HEEGNER_TABLE,
    RationalFunction,
    cm_scan,
    curve_checks,
    fixed_checks,
    fixed_point_condition,
    gamma2_fixed_points,
    heegner_checks,
    heegner_verify,
    j_minimal_polynomials,
    j_numeric,
    j_rational,
    jquadra_check,
    modular_curve,
    nome_checks,
    nome_tau,
    tau_satisfies,
    verify_landen_composition,
    verify_w_parametrization,
)


def k_poly(text: str) -> Polynomial:
    return Polynomial.parse(text, var="k")


def test_rational_function_is_kept_reduced():
    a = RationalFunction(k_poly("2*k"), k_poly("4*k**2"))
    b = RationalFunction(k_poly("1"), k_poly("2*k"))
    assert a == b
    assert a.denominator == k_poly("k")


def test_rational_function_rejects_zero_denominator():
    with pytest.raises(InvalidInputError):
        RationalFunction(k_poly("1"), k_poly("0"))


def test_j_rational_forms():
    assert j_rational("j_of_k").degree == 12
    assert j_rational("j_of_w").var == "w"
    assert j_rational("j1").evaluate(Fraction(1, 2)) == Fraction(1556068, 81)
    with pytest.raises(InvalidInputError):
        j_rational("j7")


def test_landen_ascending_maps():
    assert verify_landen_composition("up")
    assert verify_landen_composition("up2")


def test_landen_descending_map():
    assert verify_landen_composition("down")


def test_landen_unknown_direction():
    with pytest.raises(InvalidInputError):
        verify_landen_composition("sideways")


def test_w_parametrization_of_j():
    assert verify_w_parametrization()


def test_j_minimal_polynomial_of_imaginary_modulus():
    assert j_minimal_polynomials(k_poly("1+k**2")) == [Polynomial.parse("j-1728", var="j").normalized()]


def test_j_minimal_polynomial_checks_the_variable():
    with pytest.raises(DomainMismatchError):
        j_minimal_polynomials(Polynomial.parse("1-8*w**2"))


def test_modulus_map_fixed_points():
    result = fixed_point_condition("modulus-map")
    assert result.contains(k_poly("k**2+3*k+4"))
    assert {f.key() for f, _ in result.degenerate} == {k_poly("k").key(), k_poly("1-k").key()}


def test_level_two_fixed_points(golden):
    result = fixed_point_condition("(j,j1)")
    expected = {k_poly(text).normalized().key() for text in golden("modular")["fixed"]["(j,j1)"]}
    assert set(result.factors.keys()) == expected
    # total degree 16 against 14 in the list: 1+k^2 appears squared
    assert result.factors.multiplicity(k_poly("1+k**2")) == 2


@pytest.mark.slow
def test_level_four_fixed_points_include_lower_level_ones():
    result = fixed_point_condition("(j,j2)")
    assert result.contains(k_poly("k**2+3*k+4"))
    assert result.contains(k_poly("4*k**2+3*k+1"))


def test_fixed_point_pair_must_be_known():
    with pytest.raises(InvalidInputError):
        fixed_point_condition("(j,j3)")


def test_heegner_rows_with_small_discriminant():
    by_label = {e.label: e for e in HEEGNER_TABLE}
    assert heegner_verify(by_label["d=1"])
    assert heegner_verify(by_label["d=3"])


def test_class_number_two_value():
    assert jquadra_check()


def test_nome_of_the_square_lattice():
    tau = nome_tau(1 / math.sqrt(2))
    assert tau == pytest.approx(1j, abs=1e-12)
    assert j_numeric(tau) == pytest.approx(1728, rel=1e-9)
    assert tau_satisfies(tau, [(1, 0, 1)])


def test_nome_rejects_degenerate_lattice():
    from singkit.core.exceptions import ConvergenceError

    with pytest.raises(ConvergenceError):
        nome_tau(1.0)


def test_cm_scan_finds_the_seven_value():
    result = cm_scan(3)
    assert [(r["n"], r["j"]) for r in result["cm"]] == [(3, "-3375")]
    assert {r["factor"] for r in result["degenerate"]} == {"w", "1-4*w", "1+4*w"}


def test_level_two_curve_is_cubic_and_vanishes_at_cm_points():
    curve = modular_curve("(j,j1)")
    assert curve.degree == 3
    j = Symbol("j")
    diagonal = Poly(curve.to_sympy().as_expr().subs(Symbol("j1"), j), j)
    for value in (1728, -3375, 8000):
        assert diagonal.eval(value) == 0


def test_modular_curve_must_be_known():
    with pytest.raises(InvalidInputError):
        modular_curve("(j,j5)")


@pytest.mark.slow
def test_heegner_table():
    assert all(c.passed for c in heegner_checks())


@pytest.mark.slow
def test_nome_checks():
    assert all(c.passed for c in nome_checks())


@pytest.mark.slow
def test_curve_checks():
    checks = curve_checks()
    assert [c.check for c in checks if not c.passed] == []
    assert "curve:(j,j2):parametrization" in {c.check for c in checks}


@pytest.mark.slow
def test_fixed_checks():
    checks = fixed_checks()
    assert [c.check for c in checks if not c.passed] == []


@pytest.mark.slow
def test_level_four_diagonal_factors(golden):
    keys = {f.key() for f in gamma2_fixed_points()}
    for text in golden("modular")["gamma2_diagonal"]:
        assert Polynomial.parse(text, var="j").normalized().key() in keys
