from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triq.algebra import (
    QQ,
    Cubic,
    IntMatrix3,
    PrimeField,
    PrimeFieldElement,
    QuadraticSurd,
    char_poly_3x3,
    field_inverse,
    mat_pow,
    parse_field,
    spectral_radius_exact,
)
from triq.exceptions import (
    BadField,
    DivisionByZero,
    FieldMismatch,
    NonPrimeModulus,
    UnsupportedSpectrum,
)

BETA = QuadraticSurd(7, 4)
M1 = IntMatrix3(((-1, 0, 0), (4, 1, 0), (4, 0, 1)))
M2 = IntMatrix3(((1, 4, 0), (0, -1, 0), (0, 4, 1)))
# pullback of sigma_1 o sigma_2, i.e. M2 @ M1
M21 = IntMatrix3(((15, 4, 0), (-4, -1, 0), (20, 4, 1)))

int_entries = st.integers(min_value=-20, max_value=20)
int_matrices = st.lists(int_entries, min_size=9, max_size=9).map(
    lambda v: IntMatrix3((v[0:3], v[3:6], v[6:9]))
)


# field_inverse ---------------------------------------------------------------

def test_inverse_rational():
    assert field_inverse(Fraction(2, 3)) == Fraction(3, 2)


def test_inverse_prime_field():
    assert field_inverse(PrimeFieldElement(2, 5)) == PrimeFieldElement(3, 5)


def test_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        field_inverse(PrimeFieldElement(0, 5))
    with pytest.raises(DivisionByZero):
        field_inverse(Fraction(0))


@given(st.fractions().filter(lambda x: x != 0))
def test_rational_inverse_is_involution(x):
    assert field_inverse(field_inverse(x)) == x
    assert x * field_inverse(x) == 1


@given(st.sampled_from([5, 7, 101, 2**61 - 1]), st.integers())
def test_prime_inverse_is_involution(p, v):
    x = PrimeFieldElement(v, p)
    if x.value == 0:
        return
    assert field_inverse(field_inverse(x)) == x
    assert (x * field_inverse(x)).value == 1


def test_prime_field_modulus_mismatch():
    with pytest.raises(FieldMismatch):
        PrimeFieldElement(1, 5) + PrimeFieldElement(1, 7)


def test_prime_field_element_arithmetic():
    a, b = PrimeFieldElement(3, 7), PrimeFieldElement(5, 7)
    assert a + b == PrimeFieldElement(1, 7)
    assert a - b == PrimeFieldElement(5, 7)
    assert a * b == 1
    assert a / b == a * b.inverse()
    assert 1 / a == a.inverse()
    assert a ** -1 == a.inverse()
    assert a + Fraction(1, 2) == a + 4


def test_field_objects():
    assert parse_field("Q") is QQ
    assert parse_field("Fp:101") == PrimeField(101)
    assert parse_field("Fp 13") == PrimeField(13)
    with pytest.raises(NonPrimeModulus):
        parse_field("Fp:91")
    with pytest.raises(BadField):
        parse_field("F101")
    with pytest.raises(BadField):
        PrimeField(2)
    f = PrimeField(7)
    assert f.coerce(Fraction(1, 2)) == 4
    assert f.coerce(-1) == 6
    assert f.sqrt(2) in (3, 4)
    assert f.sqrt(3) is None
    assert QQ.sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert QQ.sqrt(2) is None


# characteristic polynomials --------------------------------------------------

def test_char_poly_identity():
    assert char_poly_3x3(IntMatrix3.identity()) == Cubic(-3, 3, -1)


def test_char_poly_zero():
    assert char_poly_3x3(IntMatrix3.zero()) == Cubic(0, 0, 0)


def test_char_poly_composite_example():
    cp = char_poly_3x3(M2 @ M1)
    assert cp == Cubic(-15, 15, -1)
    assert str(cp) == "λ^3 - 15λ^2 + 15λ - 1"
    # factored form with the opposite overall sign: -(x - 1)(x^2 - 14x + 1)
    for x in range(-5, 6):
        assert -cp(x) == -(x - 1) * (x * x - 14 * x + 1)


@settings(max_examples=200)
@given(int_matrices)
def test_cayley_hamilton(M):
    assert char_poly_3x3(M).at_matrix(M) == IntMatrix3.zero()


@given(int_matrices)
def test_char_poly_matches_determinant_definition(M):
    cp = char_poly_3x3(M)
    for lam in (-2, 0, 3):
        shifted = IntMatrix3.identity().scale(lam) - M
        assert cp(lam) == shifted.det()


# spectral radius ---------------------------------------------------------------

def test_spectral_radius_identity():
    assert spectral_radius_exact(IntMatrix3.identity()) == 1


def test_spectral_radius_beta():
    rho = spectral_radius_exact(M21)
    assert rho == BETA
    assert isinstance(rho, QuadraticSurd)


def test_spectral_radius_diagonal():
    assert spectral_radius_exact(IntMatrix3.diagonal(2, 3, 5)) == 5
    assert spectral_radius_exact(IntMatrix3.diagonal(2, -7, 5)) == 7


def test_spectral_radius_unsupported():
    # x^3 - 2 has no rational root
    companion = IntMatrix3(((0, 0, 2), (1, 0, 0), (0, 1, 0)))
    with pytest.raises(UnsupportedSpectrum):
        spectral_radius_exact(companion)
    # (x - 1)(x^2 - 2): sqrt(2) lies outside Q(sqrt 3)
    with pytest.raises(UnsupportedSpectrum):
        Cubic(-1, -2, 2).roots_exact()
    # (x - 1)(x^2 + 1)
    with pytest.raises(UnsupportedSpectrum):
        Cubic(-1, 1, -1).roots_exact()


@pytest.mark.parametrize("n", range(1, 11))
def test_spectral_radius_power_law(n):
    assert spectral_radius_exact(mat_pow(M21, n)) == BETA ** n


# mat_pow ----------------------------------------------------------------------

@given(int_matrices)
def test_mat_pow_zero_is_identity(M):
    assert mat_pow(M, 0) == IntMatrix3.identity()


def test_generator_squares_to_identity():
    assert mat_pow(M1, 2) == IntMatrix3.identity()


def test_mat_pow_composite_square():
    # expected value by direct integer multiplication
    expected = IntMatrix3(((209, 56, 0), (-56, -15, 0), (304, 80, 1)))
    assert M21 @ M21 == expected
    assert mat_pow(M2 @ M1, 2) == expected


@given(int_matrices, st.integers(0, 6), st.integers(0, 6))
def test_mat_pow_exponent_law(M, a, b):
    assert mat_pow(M, a + b) == mat_pow(M, a) @ mat_pow(M, b)


# quadratic surds ----------------------------------------------------------------

def test_beta_times_conjugate():
    assert BETA * QuadraticSurd(7, -4) == 1
    assert BETA.inverse() == QuadraticSurd(7, -4)


def test_surd_ordering_and_format():
    beta_prime = BETA.conjugate()
    assert 0 < beta_prime < 1 < BETA
    assert QuadraticSurd(2, -1) > 0  # 2 - sqrt 3
    assert QuadraticSurd(-2, 1) < 0
    assert abs(QuadraticSurd(-7, -4)) == BETA
    assert str(BETA) == "7+4√3"
    assert str(beta_prime) == "7-4√3"
    assert float(BETA) == pytest.approx(13.928203230275509, abs=1e-12)
    assert float(beta_prime ** 10) == pytest.approx(1 / float(BETA) ** 10, rel=1e-12)


surds = st.builds(QuadraticSurd, st.fractions(max_denominator=50), st.fractions(max_denominator=50))


@given(surds, surds, surds)
def test_surd_ring_laws(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    if x != 0:
        assert x * x.inverse() == 1


@given(surds, surds)
def test_surd_comparison_matches_float(x, y):
    fx, fy = float(x), float(y)
    if abs(fx - fy) > 1e-9:
        assert (x < y) == (fx < fy)
