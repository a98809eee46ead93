from fractions import Fraction
from math import inf

import pytest

from deltajet.base_rings import EisensteinConfig, PadicConfig, make_base_ring, make_ramified_ring
from deltajet.delta_calculus import frobenius_substitution
from deltajet.errors import ConfigError, OrderOverflow, TruncationError
from deltajet.jet_series import (
    QJetSeries,
    SeriesTruncation,
    caff_check,
    degree_profile,
    include_pi_into_p,
    lower_hull,
    monomial_label,
    overconvergence_defect,
    parse_dump,
    phi_on_series,
    radius_estimate,
    series_ring,
    to_ramified,
    trace_series,
)

Z = make_base_ring(PadicConfig(5, 12))
R = make_ramified_ring(PadicConfig(5, 12), EisensteinConfig.cyclotomic(5))


def test_truncation_validation():
    with pytest.raises(ConfigError):
        SeriesTruncation(0, 10, 0, 8)
    with pytest.raises(ConfigError):
        SeriesTruncation(1, 10, 2, 8)


def test_terms_beyond_the_cap_are_dropped_and_q_min_enforced():
    ring = series_ring(Z, D=2)
    s = QJetSeries.from_terms(ring, {(0, 3): 1, (1, 1): 2}, Q=5)
    assert s.coefficient(0, 3).is_zero()
    assert s.coefficient(1, 1) == Z(2)
    with pytest.raises(TruncationError):
        s.with_poly(s.poly + ring.gen("q") ** -2)


def test_product_precision_with_laurent_factor():
    ring = series_ring(Z, D=2)
    a = QJetSeries.from_terms(ring, {(-1,): 1, (0,): 1}, Q=10)
    b = QJetSeries.from_terms(ring, {(0,): 1, (3,): 1}, Q=10)
    c = a * b
    assert c.Q == 9
    assert c.trunc.q_min == -1
    assert c.coefficient(2) == Z(1)


def test_mixing_rings_is_an_error():
    a = QJetSeries.q_power(series_ring(Z, D=2), 1, Q=5)
    b = QJetSeries.q_power(series_ring(Z, D=3), 1, Q=5)
    with pytest.raises(TruncationError):
        a + b


def test_phi_on_series_matches_substitution():
    ring = series_ring(Z, order=2, D=6)
    s = QJetSeries.from_terms(ring, {(1,): 3, (2, 1): 1, (0, 2): 7}, Q=inf)
    assert phi_on_series(s).poly == frobenius_substitution(s.poly)
    top = QJetSeries.from_terms(ring, {(0, 0, 1): 1}, Q=inf)
    with pytest.raises(OrderOverflow):
        phi_on_series(top)


def test_phi_precision_bound():
    ring = series_ring(Z, order=2, D=3)
    s = QJetSeries.from_terms(ring, {(1,): 1}, Q=10)
    assert phi_on_series(s).Q == 5 * (10 - 3)


def test_trace_of_an_included_base_series():
    ring = series_ring(R, order=1, flavor="pi", D=3)
    s = QJetSeries.from_terms(ring, {(0, 1): 1, (2, 2): 3}, Q=5)
    tr = trace_series(include_pi_into_p(s))
    # delta_pi q = (p/pi) delta_p q, so the trace picks up Tr(p/pi) = 10
    assert tr.coefficient(0, 1) == Z(10)
    assert tr.coefficient(2, 2) == Z(3) * R.trace(R(25) * R.inv_pi**2)


def test_defect_of_delta_q():
    ring = series_ring(Z, order=1, D=2)
    dq = to_ramified(QJetSeries.jet(ring, 1, Q=3), R)
    rep = overconvergence_defect(dq, R)
    assert rep.defect == 1
    assert rep.min_valuation == Fraction(-3, 4)
    assert rep.witness == "dq"
    assert overconvergence_defect(dq * R(5), R).defect == 0


def test_hull_and_profile():
    assert lower_hull([(0, 0), (1, 2), (2, 1), (4, 3)]) == [(0, 0), (2, 1), (4, 3)]
    assert lower_hull([(0, 0), (2, 1), (4, 2)]) == [(0, 0), (4, 2)]
    ring = series_ring(Z, D=4)
    s = QJetSeries.from_terms(ring, {(0, 1): 5, (1, 2): 25, (0, 4): 125, (3, 4): 25}, Q=5)
    assert degree_profile(s) == {1: 1, 2: 2, 4: 2}
    est = radius_estimate(s)
    assert est.hull == [(1, 1), (4, 2)]
    assert est.slope == Fraction(1, 3)
    with pytest.raises(ConfigError):
        radius_estimate(s * Z(0))


def test_caff_check_needs_small_r():
    ring = series_ring(R, order=1, flavor="p", D=2)
    s = QJetSeries.from_terms(ring, {(0, 1): R(5)}, Q=3)
    assert caff_check(s, 1, R).passed
    sqrt = make_ramified_ring(PadicConfig(5, 12), EisensteinConfig.pure(5, 2))
    with pytest.raises(ConfigError):
        caff_check(s, 2, sqrt)


def test_dump_round_trip():
    ring = series_ring(R, order=2, flavor="pi", D=3)
    s = QJetSeries.from_terms(ring, {(-2, 1): R.pi, (0, 0, 1): R(3), (4,): R.inv_pi}, Q=6)
    back, header = parse_dump(s.dump(), coeffs=R)
    assert header["flavor"] == "pi"
    assert back == s
    assert back.Q == 6 and back.trunc.q_min == -2
    assert back.dump() == s.dump()


def test_monomial_labels():
    assert monomial_label((0, 0)) == "1"
    assert monomial_label((-5, 1)) == "q^-5*dq"
    assert monomial_label((2, 0, 3)) == "q^2*d2q^3"


def test_defects_behave_like_a_subring():
    from deltajet.formal_groups import psi_series

    ring = series_ring(Z, order=1, D=6)
    samples = [
        psi_series(Z, "p", 6, 100),
        QJetSeries.jet(ring, 1, Q=100),
        QJetSeries.from_terms(ring, {(1, 1): 5, (2, 2): 1}, Q=100),
        QJetSeries.from_terms(ring, {(0,): 1, (1,): 3}, Q=100),
    ]
    defect = {i: overconvergence_defect(to_ramified(s, R), R).defect for i, s in enumerate(samples)}
    for i, s in enumerate(samples):
        for j, t in enumerate(samples):
            prod = overconvergence_defect(to_ramified(s * t, R), R).defect
            total = overconvergence_defect(to_ramified(s + t, R), R).defect
            assert prod <= defect[i] + defect[j]
            assert total <= max(defect[i], defect[j])
