import random
from fractions import Fraction

import pytest

from deltajet.base_rings import (
    EisensteinConfig,
    PadicConfig,
    delta_p,
    delta_pi,
    make_base_ring,
    make_ramified_ring,
    trace,
    valuation,
)
from deltajet.errors import ConfigError


def test_config_validation():
    with pytest.raises(ConfigError):
        PadicConfig(4, 8)
    with pytest.raises(ConfigError):
        PadicConfig(3, 8)
    with pytest.raises(ConfigError):
        PadicConfig(5, 0)
    with pytest.raises(ConfigError):
        make_ramified_ring(PadicConfig(5, 8), EisensteinConfig((-25, 0)))
    with pytest.raises(ConfigError):
        make_ramified_ring(PadicConfig(5, 8), EisensteinConfig((-5, 1)))
    with pytest.raises(ConfigError):
        EisensteinConfig.parse("golden", 5)


def test_fermat_quotient_of_integers():
    Z = make_base_ring(PadicConfig(5, 10))
    assert delta_p(Z(2)) == Z(-6)
    assert delta_p(Z(3)) == Z(-48)
    assert delta_p(Z(1)).is_zero()


def test_unramified_frobenius_is_a_lift_of_order_f():
    U = make_base_ring(PadicConfig(5, 10, f=2))
    rng = random.Random(1)
    for _ in range(10):
        x = U.random_element(rng)
        assert x.frobenius().frobenius() == x
        assert valuation(x.frobenius() - x**5) >= 1
    t = U.gen()
    assert (t * t).frobenius() == t.frobenius() ** 2


def test_cyclotomic_uniformizer():
    p = 5
    R = make_ramified_ring(PadicConfig(p, 10), EisensteinConfig.cyclotomic(p))
    assert R.e == p - 1
    assert valuation(R.pi) == Fraction(1, 4)
    zeta = R.one() - R.pi
    assert zeta**p == R.one()
    assert R.pi * R.inv_pi == R.one()


def test_trace_and_gram_determinants():
    cases = [(5, "cyclotomic", 125), (7, "cyclotomic", -16807), (5, "sqrt", 20), (5, "eisenstein:-5,0,0", -675)]
    for p, pi, det in cases:
        R = make_ramified_ring(PadicConfig(p, 8), EisensteinConfig.parse(pi, p))
        assert R.gram_determinant() == R.base(det)
        assert trace(R.one()) == R.base(R.e)
    R = make_ramified_ring(PadicConfig(5, 8), EisensteinConfig.cyclotomic(5))
    assert R.trace(R.inv_pi) == R.base(2)


def test_delta_pi_divisibility_and_value():
    R = make_ramified_ring(PadicConfig(5, 12), EisensteinConfig.pure(5, 2))
    x = R(2)
    # phi fixes 2 and pi, so delta_pi(2) = (2 - 32)/pi = -30/pi = -6 pi
    assert delta_pi(x) == R(-6) * R.pi
    assert delta_pi(R.pi) == (R.pi - R.pi**5) * R.inv_pi


def test_delta_pi_of_a_non_integral_element():
    R = make_ramified_ring(PadicConfig(5, 12), EisensteinConfig.pure(5, 2))
    x = R.inv_pi
    assert delta_pi(x) == (x - x**5) * R.inv_pi


def test_delta_pi_needs_the_ring_for_base_elements():
    Z = make_base_ring(PadicConfig(5, 8))
    R = make_ramified_ring(PadicConfig(5, 8), EisensteinConfig.pure(5, 2))
    with pytest.raises(TypeError):
        delta_pi(Z(2))
    assert delta_pi(Z(2), R) == R(-6) * R.pi
