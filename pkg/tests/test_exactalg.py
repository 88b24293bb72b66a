import pytest
from fractions import Fraction
from sympy import Poly, Symbol

from singkit.core.exceptions import (
    DegeneracyError,
    DegreeCapError,
    DomainMismatchError,
    InvalidInputError,
    LiftFailureError,
    UnluckyPrimeError,
)
from singkit.services.exactalg import (
    BivariatePolynomial,
    Field,
    Polynomial,
    PrimeStream,
    QuotientRing,
    factor_poly,
    factor_set_product,
    lift_to_rationals,
    lift_vector,
    nullspace,
    poly_gcd,
    poly_resultant,
    prime_pool,
    rational_reconstruction,
    run_with_prime,
    squarefree_part,
)


def test_field_rejects_composite_characteristic():
    with pytest.raises(InvalidInputError):
        Field.mod(4)


def test_field_converts_decimal_strings(rationals):
    assert rationals.to_fraction("3/4") == Fraction(3, 4)
    assert rationals.to_str(rationals.convert(Fraction(-6, 4))) == "-3/2"


def test_prime_field_residue_of_fraction():
    F = Field.mod(7)
    # 1/3 = 5 mod 7
    assert F.to_int(Fraction(1, 3)) == 5


def test_normal_form_clears_denominators_and_content():
    p = Polynomial.parse("(2 - 8*w)/3")
    assert p.normalized() == Polynomial.parse("1 - 4*w")


def test_normal_form_makes_lowest_coefficient_positive():
    p = Polynomial.parse("-w + w**2")
    assert p.normalized().coeffs[1] > 0
    assert p.normalized().integer_coeffs() == [0, 1, -1]


def test_normalization_factor_scales_to_normal_form():
    p = Polynomial.parse("-6 + 9*w")
    assert p.scale(p.normalization_factor()) == p.normalized()


def test_polynomial_str_uses_caret_powers():
    assert str(Polynomial.parse("1+3*w+4*w**2")) == "1+3*w+4*w^2"
    assert str(Polynomial.parse("1-w")) == "1-w"


def test_mixing_variables_is_a_domain_mismatch():
    with pytest.raises(DomainMismatchError):
        Polynomial.parse("1+w") + Polynomial.parse("1+x", var="x")


def test_mixing_fields_is_a_domain_mismatch(prime_field):
    with pytest.raises(DomainMismatchError):
        Polynomial.parse("1+w") * Polynomial.parse("1+w").over(prime_field)


def test_factor_poly_reproduces_input_with_multiplicities():
    p = Polynomial.parse("(1-w)**2*(1+2*w)*(1+3*w+4*w**2)")
    result = factor_poly(p)
    assert result.expand() == p
    assert result.multiplicity(Polynomial.parse("w-1")) == 2
    assert result.multiplicity(Polynomial.parse("1+2*w")) == 1
    assert [f.degree for f, _ in result.factors] == [1, 1, 2]


def test_factor_poly_over_prime_field_splits_further():
    # w^2 + 1 is irreducible over QQ but splits mod 5
    p = Polynomial.parse("w**2 + 1")
    assert len(factor_poly(p).factors) == 1
    assert len(factor_poly(p, Field.mod(5)).factors) == 2


def test_factor_poly_refuses_degrees_above_the_cap():
    p = Polynomial.monomial(200) + Polynomial.constant(1)
    with pytest.raises(DegreeCapError) as exc:
        factor_poly(p)
    assert exc.value.exit_code == 3


def test_degree_cap_counts_the_squarefree_core():
    p = Polynomial.parse("(1-w)**130*(1+w)")
    result = factor_poly(p)
    assert result.multiplicity(Polynomial.parse("1-w")) == 130
    assert result.multiplicity(Polynomial.parse("1+w")) == 1


def test_gcd_and_squarefree_part():
    a = Polynomial.parse("(1-w)*(1+2*w)")
    b = Polynomial.parse("(1-w)*(1-4*w)")
    assert poly_gcd(a, b) == Polynomial.parse("1-w")
    assert squarefree_part(Polynomial.parse("(1-w)**3*(1+w)")) == Polynomial.parse("(1-w)*(1+w)").normalized()


def test_factor_set_product_deduplicates_factors():
    product = factor_set_product([Polynomial.parse("(1-w)**2"), Polynomial.parse("(1-w)*(1+w)")])
    assert product == Polynomial.parse("(1-w)*(1+w)").normalized()


def test_resultant_eliminates_the_outer_variable():
    z, w = Symbol("z"), Symbol("w")
    a = BivariatePolynomial.from_sympy(Poly(z - w, z, w))
    b = BivariatePolynomial.from_sympy(Poly(z**2 - 2, z, w))
    assert poly_resultant(a, b).normalized() == Polynomial.parse("w**2 - 2").normalized()


def test_bivariate_json_round_trip_keeps_the_inner_variable():
    z, w = Symbol("z"), Symbol("w")
    a = BivariatePolynomial.from_sympy(Poly(z**2 * w - 3 * z + w**3, z, w))
    assert BivariatePolynomial.from_json(a.to_json()) == a


def test_quotient_ring_inverse_and_rational_values():
    ring = QuotientRing(Polynomial.parse("t**2 - 5", var="t"))
    t = Polynomial.parse("t", var="t")
    one = ring.mul(t, ring.inverse(t))
    assert one == Polynomial.constant(1, var="t")
    assert ring.as_rational(t * t) == Fraction(5)
    assert ring.as_rational(t) is None


def test_quotient_ring_division_by_zero_is_degenerate():
    ring = QuotientRing(Polynomial.parse("t**2 - 5", var="t"))
    with pytest.raises(DegeneracyError):
        ring.inverse(Polynomial.parse("t**2 - 5", var="t"))


def test_quotient_ring_gcd_in_extension():
    # over QQ(sqrt 5): gcd(z^2 - 5, z - t) = z - t
    ring = QuotientRing(Polynomial.parse("t**2 - 5", var="t"))
    t = Polynomial.parse("t", var="t")
    c = lambda v: Polynomial.constant(v, var="t")
    g = ring.poly_gcd([[c(-5), c(0), c(1)], [-t, c(1)]])
    assert g == [-t, c(1)]


def test_prime_pool_is_fixed_and_descending():
    pool = prime_pool()
    assert len(pool) == 50
    assert all(p < 2**61 for p in pool)
    assert list(pool) == sorted(pool, reverse=True)


def test_prime_stream_starts_at_offset():
    assert PrimeStream(offset=3).next() == prime_pool()[3]


def test_prime_stream_exhaustion_is_a_lift_failure():
    stream = PrimeStream(offset=49)
    stream.next()
    with pytest.raises(LiftFailureError):
        stream.next()


def test_run_with_prime_switches_on_unlucky_prime():
    calls = []

    def task(p):
        calls.append(p)
        if len(calls) == 1:
            raise UnluckyPrimeError(p)
        return p % 1000

    stream = PrimeStream(offset=0)
    p, value = run_with_prime(task, stream)
    assert p == prime_pool()[1]
    assert stream.discarded == [prime_pool()[0]]
    assert value == p % 1000


def test_nullspace_mod_p(prime):
    basis = nullspace([[1, 1, 0], [0, 1, 1]], prime)
    assert basis == [(1, prime - 1, 1)]


def test_nullspace_of_full_rank_matrix_is_empty(prime):
    assert nullspace([[1, 0], [0, 1]], prime) == []


def test_rational_reconstruction_recovers_small_fractions(prime):
    assert rational_reconstruction(3 * pow(7, -1, prime), prime) == Fraction(3, 7)
    assert rational_reconstruction(-5 * pow(11, -1, prime), prime) == Fraction(-5, 11)


def test_lift_to_rationals_needs_enough_primes():
    value = Fraction(123456789123456789, 1000000007)
    p, q = prime_pool()[0], prime_pool()[1]
    residues = [(value.numerator * pow(value.denominator, -1, r) % r, r) for r in (p, q)]
    assert lift_to_rationals(residues) == value


def test_lift_vector_lifts_entrywise(prime):
    vec = [Fraction(1, 2), Fraction(-3), Fraction(0)]
    image = [f.numerator * pow(f.denominator, -1, prime) % prime for f in vec]
    assert lift_vector([(image, prime)]) == vec


def test_lift_rejects_repeated_primes(prime):
    with pytest.raises(InvalidInputError):
        lift_to_rationals([(1, prime), (1, prime)])
