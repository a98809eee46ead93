from fractions import Fraction
from math import inf

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltajet.errors import PrecisionExhausted
from deltajet.padic import PadicField, parse_padic, vp_int, vp_rational

F = PadicField(5, 10)


def test_valuations_of_rationals():
    assert vp_int(250, 5) == 3
    assert vp_int(0, 5) == inf
    assert vp_rational(Fraction(7, 25), 5) == -2


def test_integer_round_trip():
    x = F(1234)
    assert x.lift() == 1234
    assert F(-1).lift() == 5**10 - 1
    assert F(Fraction(1, 5)).valuation() == -1


def test_division_by_p_costs_a_digit():
    x = F(3)
    y = (x - F(3 + 5**4)) / 5
    assert y.valuation() == 3
    assert y.absprec == 9


def test_cancellation_is_tracked():
    a = F(1 + 5**3)
    b = F(1)
    d = a - b
    assert d.valuation() == 3
    assert d.absprec == 10


def test_exact_zero_absorbs():
    z = F(0)
    assert z.is_exact_zero()
    assert (z * F(7)).is_exact_zero()
    assert (F(7) + z) == F(7)


def test_inexact_zero_keeps_absolute_precision():
    z = F(5) - F(5)
    assert z.is_zero() and not z.is_exact_zero()
    assert z.absprec == 11


def test_division_by_zero_is_a_precision_error():
    with pytest.raises(PrecisionExhausted):
        F(3) / (F(2) - F(2))


def test_residue_and_add_bigoh():
    x = F(1 + 2 * 5 + 3 * 25)
    assert x.residue(2) == 11
    assert x.add_bigoh(2).absprec == 2
    with pytest.raises(PrecisionExhausted):
        x.add_bigoh(2).residue(3)


def test_digit_string_round_trip():
    for v in [F(0), F(3) - F(3), F(17), F(Fraction(2, 25)), F(-1)]:
        assert parse_padic(F, v.digit_string()).digit_string() == v.digit_string()


def test_repr_uses_signed_representative():
    assert repr(F(-3)).startswith("-3 + O(5^")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5**8), st.integers(1, 5**8), st.integers(1, 5**8))
def test_ring_axioms(a, b, c):
    x, y, z = F(a), F(b), F(c)
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert ((x * y) / y) == x
