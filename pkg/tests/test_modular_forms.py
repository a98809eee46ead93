from fractions import Fraction

import pytest

from deltajet import modular_forms as mf
from deltajet.base_rings import EisensteinConfig, PadicConfig, make_ramified_ring
from deltajet.errors import ConfigError, HypothesisViolation, IntegralityFailure, MalformedFile, RelationViolation
from deltajet.jet_series import QJetSeries, series_ring

P = 5
CYC = make_ramified_ring(PadicConfig(P, 40), EisensteinConfig.cyclotomic(P))


def eta_product_level_11(Q):
    """q prod (1 - q^n)^2 (1 - q^(11 n))^2, the weight 2 newform of level 11."""
    c = [0] * (Q + 1)
    c[1] = 1
    for n in range(1, Q + 1):
        for step in (n, 11 * n):
            if step > Q:
                continue
            for _ in range(2):
                for m in range(Q, step - 1, -1):
                    c[m] -= c[m - step]
    return mf.QSeries([Fraction(x) for x in c])


def test_arithmetic_helpers():
    assert mf.primes_upto(20) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert mf.factorize(360) == {2: 3, 3: 2, 5: 1}
    assert mf.sigma(3, 6) == 1 + 8 + 27 + 216


def test_level_11_form_is_an_eigenform():
    f = eta_product_level_11(60)
    assert [f[n] for n in range(1, 8)] == [1, -2, -1, 2, 1, 2, -2]
    for n in range(1, 13):
        assert mf.hecke_T(2, 11, n, f) == f * f[n]


def test_hecke_operator_rejects_jet_variables():
    ring = series_ring(CYC.base, D=2)
    s = QJetSeries.from_terms(ring, {(1, 1): 1}, Q=5)
    with pytest.raises(ConfigError):
        mf.hecke_T(2, 7, 2, s)


def test_system_validation():
    with pytest.raises(ConfigError):
        mf.random_system(4, 5, 20, 0)
    with pytest.raises(ConfigError):
        mf.random_system(7, 7, 20, 0)


def test_synthetic_systems_satisfy_the_relations():
    h = mf.random_system(7, 5, 60, seed=2)
    assert h.verify(require_ap_one=True)
    assert h[5] == 1
    assert h[35] == h[5] * h[7]
    bad = h.with_coefficient(12, h[12] + 1)
    with pytest.raises(RelationViolation) as info:
        bad.verify()
    assert info.value.n == 12


def test_coefficient_file_round_trip():
    h = mf.random_system(11, 7, 40, seed=4)
    back = mf.ingest(mf.write_coefficient_file(h), require_ap_one=True)
    assert back.a == h.a and back.N == 11 and back.p == 7


@pytest.mark.parametrize(
    "text",
    [
        "",
        "7 5 2\n",
        "7 5 2 2 x\n1 1\n",
        "7 5 2 2 x\n1 1\n1 1\n2 0\n",
        "7 5 2 2 x\n1 1\n2 zero\n",
        "7 5 2 2 x\n1 1\n3 0\n",
    ],
)
def test_malformed_files(text):
    with pytest.raises(MalformedFile):
        mf.ingest(text)


def test_bracket_needs_enough_coefficients():
    h = mf.random_system(7, P, 20, seed=1)
    with pytest.raises(ConfigError):
        mf.bracket_coefficients(h, 30, 6)


def test_fsharp_pi_is_integral_and_consistent():
    h = mf.random_system(7, P, 60, seed=1)
    fs = mf.expansion_fsharp_pi(h, CYC, 50, P + 1)
    assert all(fs.forms_agree.values())
    assert fs.min_valuation >= 0
    assert mf.congruence_mod_pi(h, fs, 50).passed


def test_corrupted_coefficient_breaks_integrality():
    h = mf.random_system(7, P, 60, seed=1)
    bad = h.with_coefficient(2 * P, h[2 * P] + 1)
    with pytest.raises(IntegralityFailure) as info:
        mf.expansion_fsharp_pi(bad, CYC, 50, P + 1)
    assert info.value.witness == "q^50"


def test_tau_series_coefficients():
    # coefficient of q^(p(n-1)) dq in the trace is ((p-1)/2) p a_n
    h = mf.random_system(7, P, 60, seed=1)
    fs = mf.expansion_fsharp_pi(h, CYC, 50, P + 1)
    rep = mf.expansion_tau_and_fsharp_p(h, fs, 50)
    for n in range(1, 10):
        assert rep.tau.coefficient(P * (n - 1), 1) == CYC.base(Fraction(P - 1, 2) * P * h[n])
    names = {v.name: v.passed for v in rep.verdicts}
    assert names["tau-closed-form"] and names["tau-divisible-by-p"] and names["fsharp-p-congruence-mod-p"]


def test_bernoulli_numbers():
    assert mf.bernoulli(1) == Fraction(-1, 2)
    assert mf.bernoulli(2) == Fraction(1, 6)
    assert mf.bernoulli(4) == Fraction(-1, 30)
    assert mf.bernoulli(12) == Fraction(-691, 2730)


def test_eisenstein_series():
    E4 = mf.eisenstein_Ep1(5, 4)
    assert E4.coeffs == [1, 240, 2160, 6720, 17520]
    E6 = mf.eisenstein_Ep1(7, 2)
    assert E6.coeffs == [1, -504, -16632]


def test_unit_root():
    E4 = mf.eisenstein_Ep1(5, 30)
    eps = mf.unit_root(E4, 4, 5)
    assert eps[1] == 60
    assert eps**4 == E4
    with pytest.raises(HypothesisViolation):
        mf.unit_root(E4, 5, 5)
    with pytest.raises(HypothesisViolation):
        mf.unit_root(mf.QSeries([Fraction(1), Fraction(1)]), 4, 5)


def test_geometric_trace_forward():
    ring = series_ring(CYC.base, D=1)
    c0 = QJetSeries.from_terms(ring, {(0,): 1}, Q=4)
    c1 = QJetSeries.from_terms(ring, {(0,): 2}, Q=4)
    eps = mf.QSeries([Fraction(1), Fraction(5), Fraction(0), Fraction(0)])
    out = mf.geometric_trace_forward([c0, c1], eps)
    assert out.coefficient(0) == CYC.base(3)
    assert out.coefficient(1) == CYC.base(10)
    with pytest.raises(ConfigError):
        mf.geometric_trace_forward([], eps)


def test_reference_expansion_is_reduced():
    h = mf.random_system(7, P, 60, seed=1)
    ref = mf.gamma0N_reference_expansion(h, CYC.base, 30)
    for key, c in ref.items():
        assert 0 <= c.lift() < P
    twist = mf.f_inverse_twist(h, 30)
    for n in range(1, 31):
        if n % P:
            expected = twist[n].numerator * pow(twist[n].denominator, -1, P) % P
            assert ref.coefficient(n).lift() == expected
