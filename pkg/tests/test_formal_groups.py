from fractions import Fraction

import pytest

from deltajet import formal_groups as fg
from deltajet.base_rings import EisensteinConfig, PadicConfig, make_ramified_ring
from deltajet.errors import ConfigError, HypothesisViolation, IntegralityFailure

P = 5
CYC = make_ramified_ring(PadicConfig(P, 30), EisensteinConfig.cyclotomic(P))


def test_reversion_gives_the_exponential():
    logs = [Fraction((-1) ** (n - 1), n) for n in range(1, 6)]
    assert fg.reversion(logs, 5) == [1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24), Fraction(1, 120)]
    with pytest.raises(ConfigError):
        fg.reversion([2, 0], 2)


def test_multiplicative_group_axioms_and_law():
    g = fg.multiplicative_group(8)
    assert all(g.check_axioms().values())
    law = fg.from_logarithm(g.log_coeffs, 8)
    assert law.law == g.law


def test_additive_group_and_p_typical_law():
    assert all(fg.additive_group(6).check_axioms().values())
    logs = [1, 0, 0, 0, Fraction(1, P)]
    g = fg.from_logarithm(logs, 2 * P, P)
    assert all(g.check_axioms().values())


def test_non_integral_logarithm_is_rejected():
    with pytest.raises(IntegralityFailure):
        fg.from_logarithm([1, 0, 0, 0, Fraction(1, 25)], 10, P)


def test_first_jet_law_of_gm():
    # delta(T1 + T2 + T1 T2) at T = 0 is dT1 + dT2 + p dT1 dT2
    law = fg.jet_group_law(fg.multiplicative_group(2 * P), 1, P)
    F1 = law.components[0]
    Z = law.ring.coeffs
    assert F1.coefficient({("T1", 1): 1}) == Z(1)
    assert F1.coefficient({("T2", 1): 1}) == Z(1)
    assert F1.coefficient({("T1", 1): 1, ("T2", 1): 1}) == Z(P)
    assert len([c for c in F1.terms.values() if not c.is_zero()]) == 3


def test_jet_law_methods_agree_and_satisfy_axioms():
    g = fg.multiplicative_group(2 * P)
    a = fg.jet_group_law(g, 2, P, method="tree")
    b = fg.jet_group_law(g, 2, P, method="frobenius")
    assert all(x == y for x, y in zip(a.components, b.components))
    assert all(a.check_axioms().values())


def test_log_jets_of_gm_order_one():
    # L = sum (-1)^(n+1) p^(n-1)/n (dT)^n
    g = fg.multiplicative_group(2 * P)
    L = fg.log_jets(g, 1, P)
    Z = L.ring.coeffs
    for n in range(1, 5):
        assert L.coefficient({("T", 1): n}) == Z(Fraction((-1) ** (n + 1) * P ** (n - 1), n))
    assert fg.log_jets_homomorphism(L, fg.jet_group_law(g, 1, P))


def test_g_r_pi_closed_form():
    # phi^2(T)|_{T=0} / pi = pi d2T + (pi^(p-1) + 1) dT^p since phi fixes pi
    G, _ = fg.g_r_pi(2, CYC, 2 * P)
    assert G.coefficient({("T", 2): 1}) == CYC.pi
    assert G.coefficient({("T", 1): P}) == CYC.pi ** (P - 1) + CYC.one()
    assert len([c for c in G.terms.values() if not c.is_zero()]) == 2


def test_l_r_pi_two_routes_agree():
    for r in (1, 2):
        res = fg.l_r_pi(fg.multiplicative_group(2 * P), r, CYC)
        assert res.agree and res.integral
        assert res.first_difference is None


def test_l_r_pi_hypothesis():
    wild = make_ramified_ring(PadicConfig(P, 10), EisensteinConfig.pure(P, 5))
    with pytest.raises(HypothesisViolation):
        fg.l_r_pi(fg.multiplicative_group(2 * P), 1, wild)


def test_minimal_integrality_exponents_are_frozen():
    law = fg.jet_group_law(fg.multiplicative_group(2 * P), 2, P)
    assert fg.minimal_integrality_exponent(law.components[0], CYC) == 1
    assert fg.minimal_integrality_exponent(law.components[1], CYC) == 5


def test_psi_characters():
    ch = fg.psi_characters(CYC, 3 * P)
    assert all(v for v in ch.checks.values() if v is not None)


def test_psi_series_coefficients():
    s = fg.psi_series(CYC.base, "p", 4, 1)
    Z = CYC.base
    for n in range(1, 5):
        assert s.coefficient(-P * n, n) == Z(Fraction((-1) ** (n - 1) * P ** (n - 1), n))
    t = fg.psi_series(CYC, "pi", 3, 1)
    assert t.coefficient(-2 * P, 2) == CYC.pi * CYC(Fraction(-1, 2))


def test_log_jet_defect_is_one():
    from deltajet.jet_series import QJetSeries, overconvergence_defect, series_ring, to_ramified

    L = fg.log_jets(fg.multiplicative_group(2 * P), 1, P)
    ring = series_ring(L.ring.coeffs, order=1, D=2 * P)
    terms = {(0,) + k[1:]: c for k, c in L.terms.items()}
    s = to_ramified(QJetSeries.from_terms(ring, terms, Q=1), CYC)
    assert overconvergence_defect(s, CYC).defect == 1
    assert overconvergence_defect(s * CYC(P), CYC).defect == 0


def test_log_jets_match_direct_substitution():
    from deltajet.delta_calculus import frobenius_substitution

    g = fg.multiplicative_group(2 * P)
    for r in (1, 2):
        L = fg.log_jets(g, r, P)
        ring = L.ring
        T = ring.gen("T")
        x = ring.zero()
        for n, a in enumerate(g.log_coeffs, start=1):
            x = x + (T**n).scale(ring.coeffs(a))
        for _ in range(r):
            x = frobenius_substitution(x)
        assert fg._set_order0_zero(x) / P == L
