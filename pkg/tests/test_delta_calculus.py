import random

import pytest

from deltajet.base_rings import EisensteinConfig, PadicConfig, make_base_ring, make_ramified_ring
from deltajet.delta_calculus import (
    JetRing,
    Weight,
    conjugate_apply,
    conversion_polynomial,
    frobenius_substitution,
    gen_binomial,
    p_to_pi,
    phi_hat,
    pi_to_p,
    prolong,
    weight_action,
)
from deltajet.errors import ConfigError, OrderOverflow

Z5 = make_base_ring(PadicConfig(5, 20))
SQRT5 = make_ramified_ring(PadicConfig(5, 20), EisensteinConfig.pure(5, 2))
CYC5 = make_ramified_ring(PadicConfig(5, 20), EisensteinConfig.cyclotomic(5))


def random_poly(ring, rng, terms=4):
    acc = ring.zero()
    for _ in range(terms):
        m = ring.one()
        for var in ring.variables:
            for j in range(ring.order):
                m = m * ring.gen(var, j) ** rng.randint(0, 2)
        acc = acc + m.scale(ring.coeffs(rng.randint(-9, 9)))
    return acc


def test_generalized_binomial():
    assert gen_binomial(5, 2) == 10
    assert gen_binomial(-1, 3) == -1
    assert gen_binomial(-2, 2) == 3
    assert gen_binomial(4, -1) == 0


def test_pi_flavor_needs_ramified_coefficients():
    with pytest.raises(ConfigError):
        JetRing(Z5, ("x",), order=1, flavor="pi")


def test_prolongation_methods_agree():
    rng = random.Random(3)
    for coeffs, flavor in [(Z5, "p"), (SQRT5, "pi")]:
        ring = JetRing(coeffs, ("x", "y"), order=2, flavor=flavor)
        for _ in range(3):
            f = random_poly(ring, rng)
            a = prolong(f, "tree")
            assert a == prolong(f, "fold")
            assert a == prolong(f, "frobenius")


def test_phi_hat_is_the_frobenius_substitution():
    ring = JetRing(Z5, ("x",), order=2)
    f = ring.gen("x") ** 2 + ring.gen("x", 1).scale(Z5(3))
    assert phi_hat(f) == frobenius_substitution(f)


def test_product_rule_symbolically():
    ring = JetRing(Z5, ("x", "y"), order=1)
    x, y = ring.gen("x"), ring.gen("y")
    dx, dy = ring.gen("x", 1), ring.gen("y", 1)
    expected = x**5 * dy + y**5 * dx + (dx * dy).scale(Z5(5))
    assert prolong(x * y) == expected


def test_frobenius_of_top_order_overflows():
    ring = JetRing(Z5, ("x",), order=1)
    with pytest.raises(OrderOverflow):
        frobenius_substitution(ring.gen("x", 1))


def test_conversion_polynomial_for_sqrt_p():
    # with pi^2 = 5: delta_pi^2 = 5 delta_p^2 - 24 (delta_p)^5 by hand
    d1 = conversion_polynomial(1, SQRT5)
    assert d1.F.is_zero()
    d2 = conversion_polynomial(2, SQRT5)
    assert d2.shift == 0
    assert d2.leading == SQRT5(5)
    assert len([c for c in d2.F.terms.values() if not c.is_zero()]) == 1
    assert d2.F.coefficient({("v", 1): 5}) == SQRT5(-24)


def test_conversion_degrees_are_bounded():
    for n in (1, 2, 3):
        data = conversion_polynomial(n, CYC5)
        assert data.degree <= 5 ** (n - 1)
        assert data.shift == max(4 - n, 0)


def test_coordinate_changes_are_inverse():
    rng = random.Random(5)
    ring = JetRing(CYC5, ("v",), order=2, flavor="pi")
    for _ in range(3):
        f = random_poly(ring, rng, terms=3) + ring.gen("v", 2)
        g = pi_to_p(f)
        assert g.ring.flavor == "p"
        assert p_to_pi(g).agrees_with(f, 10)


def test_conjugate_closed_forms_r1():
    ring = JetRing(Z5, ("x",), order=1)
    x = ring.gen("x")
    f = x**3 + x.scale(Z5(2))
    der = {"x": ring.one()}
    df = f.derivative("x")
    assert conjugate_apply(1, f, der).is_zero()
    assert conjugate_apply(1, prolong(f), der) == frobenius_substitution(df)
    assert conjugate_apply(0, prolong(f), der) == -(f**4) * df


def test_conjugate_r2_is_integral_and_annihilates_phi():
    ring = JetRing(Z5, ("x",), order=2)
    x = ring.gen("x")
    der = {"x": x}
    phi1 = frobenius_substitution(x)
    assert conjugate_apply(0, phi1, der).is_zero()
    assert conjugate_apply(1, phi1, der) == frobenius_substitution(x).scale(Z5(5))
    out = conjugate_apply(2, prolong(prolong(x)), der)
    assert out.min_valuation() >= 0


def test_weight_action():
    ring = JetRing(Z5, ("x",), order=1)
    x = ring.gen("x")
    assert weight_action(x, Weight((1, 1))) == x * frobenius_substitution(x)
    assert Weight((1, 2)).degree == 3
    assert (Weight((1, 2)) - Weight((1,))).coeffs == (0, 2)
