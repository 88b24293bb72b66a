import pytest

from singkit.core.exceptions import InvalidInputError
from singkit.services.exactalg import Polynomial
from singkit.services.sorokin import assert_annihilates, sorokin_operator, sorokin_verify


def test_operator_shape():
    L = sorokin_operator(2)
    assert L.order == 4
    assert L.variable == "x"
    assert L.head == Polynomial.parse("(x-1)**2*x**4", var="x")


def test_operator_needs_positive_n():
    with pytest.raises(InvalidInputError):
        sorokin_operator(0)


@pytest.mark.parametrize("n", [1, 2])
def test_operator_annihilates_both_parts(n):
    result = sorokin_verify(n, 40)
    checks = {c.check: c for c in result.checks}
    assert checks["annihilate:rational"].passed
    assert checks["annihilate:zeta2"].passed
    assert checks["control:shifted"].passed
    assert result.passed


@pytest.mark.slow
@pytest.mark.parametrize("n", [3, 4, 5])
def test_operator_annihilates_at_eighty_terms(n):
    assert sorokin_verify(n, 80).passed


def test_indicial_data_is_reported():
    result = sorokin_verify(1, 30, control=False)
    reported = [c for c in result.checks if c.status == "reported"]
    assert [c.check for c in reported] == ["indicial:0", "indicial:1"]
    assert all(c.details["polynomial"] for c in reported)


def test_short_series_are_rejected():
    with pytest.raises(InvalidInputError):
        sorokin_verify(2, 19)


def test_assert_annihilates_passes_quietly():
    assert_annihilates(1, 30)
