from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from invforge.scalar import QQi, frac_from_str, frac_to_str

rationals = st.fractions(
    min_value=-50, max_value=50, max_denominator=20
)
scalars = st.builds(QQi, rationals, rationals)


def test_canonical_form():
    z = QQi(Fraction(2, 4), Fraction(-3, -6))
    assert z.re == Fraction(1, 2) and z.im == Fraction(1, 2)
    assert z == QQi(Fraction(1, 2), Fraction(1, 2))


def test_arithmetic_basics():
    i = QQi(0, 1)
    assert i * i == QQi(-1)
    assert (QQi(1, 2) * QQi(3, -1)) == QQi(5, 5)
    assert QQi(1, 1) / QQi(1, 1) == QQi(1)
    assert QQi(2, 1).conjugate() == QQi(2, -1)
    assert QQi(3, 4).abs_sq() == 25


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        QQi(1) / QQi(0)


@given(scalars, scalars)
def test_mul_commutes_and_conjugate_distributes(a, b):
    assert a * b == b * a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()


@given(scalars)
def test_division_inverts_multiplication(a):
    if a:
        assert (a * QQi(7, 3)) / a == QQi(7, 3)


@given(scalars)
def test_string_round_trip(a):
    re, im = a.to_str_pair()
    assert "/" in re and "." not in re
    assert QQi.from_str_pair(re, im) == a


@given(rationals)
def test_fraction_string_round_trip(f):
    assert frac_from_str(frac_to_str(f)) == f
    assert frac_from_str(str(f.numerator * 2) + "/" + str(f.denominator * 2)) == f
