"""One-dimensional formal groups, their jet group laws and logarithm jets.

Formal group laws and logarithms are handled with exact rational arithmetic
(:class:`MSeries`).  They are moved into jet rings over Z_p only when the
prolongation machinery needs them.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import inf

from .base_rings import PadicField, RamifiedRing
from .delta_calculus import JetPolynomial, JetRing, frobenius_substitution, p_to_pi, pi_to_p, prolong
from .errors import ConfigError, DivisibilityFailure, HypothesisViolation, IntegralityFailure
from .padic import vp_rational

__all__ = [
    "MSeries",
    "FormalGroupData",
    "multiplicative_group",
    "additive_group",
    "from_logarithm",
    "JetGroupLaw",
    "jet_group_law",
    "log_jets",
    "g_r_pi",
    "l_r_pi",
    "LrPiResult",
    "psi_characters",
    "PsiCharacters",
    "psi_series",
    "minimal_integrality_exponent",
]


class MSeries:
    """Multivariate power series over Q truncated at total degree ``cutoff``."""

    __slots__ = ("nvars", "cutoff", "c")

    def __init__(self, nvars, cutoff, coeffs=None):
        self.nvars = nvars
        self.cutoff = cutoff
        self.c = {}
        for k, v in (coeffs or {}).items():
            if v and sum(k) <= cutoff:
                self.c[tuple(k)] = Fraction(v)

    @classmethod
    def var(cls, nvars, cutoff, i):
        k = [0] * nvars
        k[i] = 1
        return cls(nvars, cutoff, {tuple(k): 1})

    @classmethod
    def const(cls, nvars, cutoff, a):
        return cls(nvars, cutoff, {(0,) * nvars: a})

    def __add__(self, other):
        if not isinstance(other, MSeries):
            other = MSeries.const(self.nvars, self.cutoff, other)
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, 0) + v
        return MSeries(self.nvars, min(self.cutoff, other.cutoff), out)

    __radd__ = __add__

    def __neg__(self):
        return MSeries(self.nvars, self.cutoff, {k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MSeries):
            return MSeries(self.nvars, self.cutoff, {k: v * other for k, v in self.c.items()})
        cut = min(self.cutoff, other.cutoff)
        out = {}
        for ka, va in self.c.items():
            da = sum(ka)
            for kb, vb in other.c.items():
                if da + sum(kb) > cut:
                    continue
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + va * vb
        return MSeries(self.nvars, cut, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = MSeries.const(self.nvars, self.cutoff, 1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, MSeries):
            return NotImplemented
        d = self - other
        return not any(d.c.values())

    __hash__ = None

    def coefficient(self, *k):
        return self.c.get(tuple(k), Fraction(0))

    def compose(self, images):
        """Substitute series (without constant term) for the variables."""
        cut = min([self.cutoff] + [g.cutoff for g in images])
        n = images[0].nvars
        acc = MSeries(n, cut)
        cache = {}
        for k, v in self.c.items():
            term = MSeries.const(n, cut, v)
            for i, e in enumerate(k):
                if e:
                    if (i, e) not in cache:
                        cache[(i, e)] = images[i] ** e
                    term = term * cache[(i, e)]
            acc = acc + term
        return acc

    def min_p_valuation(self, p):
        return min((vp_rational(v, p) for v in self.c.values() if v), default=inf)


def univariate(coeffs, nvars, cutoff, var=0):
    """sum_n coeffs[n-1] X^n as an MSeries in the variable ``var``."""
    out = {}
    for n, a in enumerate(coeffs, start=1):
        k = [0] * nvars
        k[var] = n
        out[tuple(k)] = a
    return MSeries(nvars, cutoff, out)


def reversion(coeffs, cutoff):
    """Coefficients of the compositional inverse of T + a_2 T^2 + ..."""
    if Fraction(coeffs[0]) != 1:
        raise ConfigError("a_1 must be 1")
    l = univariate(coeffs[:cutoff], 1, cutoff)
    e = [Fraction(1)] + [Fraction(0)] * (cutoff - 1)
    for n in range(2, cutoff + 1):
        comp = l.compose([univariate(e, 1, cutoff)])
        e[n - 1] -= comp.coefficient(n)
    return e


@dataclass
class FormalGroupData:
    """A formal group law with its logarithm, truncated at total degree ``cutoff``."""

    law: MSeries
    log_coeffs: list
    cutoff: int
    name: str = "formal group"

    def __post_init__(self):
        self.log_coeffs = [Fraction(a) for a in self.log_coeffs[: self.cutoff]]
        if self.log_coeffs[0] != 1:
            raise ConfigError("a_1 must be 1")

    def exp_coeffs(self):
        return reversion(self.log_coeffs, self.cutoff)

    def log_series(self, nvars=1, var=0):
        return univariate(self.log_coeffs, nvars, self.cutoff, var)

    def inverse_series(self):
        """i(T) with F(T, i(T)) = 0, as exp(-log T)."""
        e = univariate(self.exp_coeffs(), 1, self.cutoff)
        return e.compose([-self.log_series()])

    def check_integral(self, p):
        """n * a_n and the law must be p-integral."""
        for n, a in enumerate(self.log_coeffs, start=1):
            if n * a != 0 and vp_rational(n * a, p) < 0:
                raise IntegralityFailure(f"{n} a_{n} is not p-integral", witness=f"a_{n}")
        for k, v in sorted(self.law.c.items()):
            if vp_rational(v, p) < 0:
                raise IntegralityFailure(f"law coefficient at T1^{k[0]} T2^{k[1]} is not p-integral", witness=k)

    def check_axioms(self):
        """Identity, commutativity, associativity and log compatibility at cutoff."""
        cut = self.cutoff
        F = self.law
        T1 = MSeries.var(2, cut, 0)
        zero = MSeries(2, cut)
        ok = {}
        ok["identity"] = F.compose([T1, zero]) == T1 and F.compose([zero, T1]) == T1
        swapped = F.compose([MSeries.var(2, cut, 1), MSeries.var(2, cut, 0)])
        ok["commutative"] = swapped == F
        X, Y, Z = (MSeries.var(3, cut, i) for i in range(3))
        left = F.compose([F.compose([X, Y]), Z])
        right = F.compose([X, F.compose([Y, Z])])
        ok["associative"] = left == right
        l = self.log_series()
        lhs = l.compose([F])
        rhs = self.log_series(2, 0) + self.log_series(2, 1)
        ok["logarithm"] = lhs == rhs
        inv = self.inverse_series()
        T = MSeries.var(1, cut, 0)
        ok["inverse"] = not any(F.compose([T, inv]).c.values())
        return ok


def multiplicative_group(cutoff):
    """F = T1 + T2 + T1 T2 with log(1 + T)."""
    law = MSeries(2, cutoff, {(1, 0): 1, (0, 1): 1, (1, 1): 1})
    logs = [Fraction((-1) ** (n - 1), n) for n in range(1, cutoff + 1)]
    return FormalGroupData(law, logs, cutoff, "multiplicative")


def additive_group(cutoff):
    law = MSeries(2, cutoff, {(1, 0): 1, (0, 1): 1})
    logs = [Fraction(1)] + [Fraction(0)] * (cutoff - 1)
    return FormalGroupData(law, logs, cutoff, "additive")


def from_logarithm(log_coeffs, cutoff, p=None, name="from logarithm"):
    """F = l^{-1}(l(T1) + l(T2)); p-integrality is checked when ``p`` is given."""
    logs = [Fraction(a) for a in log_coeffs][:cutoff]
    logs += [Fraction(0)] * (cutoff - len(logs))
    e = univariate(reversion(logs, cutoff), 1, cutoff)
    s = univariate(logs, 2, cutoff, 0) + univariate(logs, 2, cutoff, 1)
    law = e.compose([s])
    g = FormalGroupData(law, logs, cutoff, name)
    if p is not None:
        g.check_integral(p)
    return g


# ---------------------------------------------------------------------------
# Jet group laws
# ---------------------------------------------------------------------------


def _law_to_jet(g, ring):
    """The law as a jet polynomial in T1, T2 (order-0 variables of ``ring``)."""
    terms = {}
    for (i, j), v in g.law.c.items():
        key = [0] * ring.width
        key[ring.index("T1", 0)] = i
        key[ring.index("T2", 0)] = j
        terms[tuple(key)] = ring.coeffs(v)
    return JetPolynomial(ring, terms)


def _set_order0_zero(poly):
    R = poly.ring
    r1 = R.order + 1
    return poly.filter(lambda k: all(k[i] == 0 for i in range(0, R.width, r1)))


@dataclass
class JetGroupLaw:
    """F_1..F_r: the jets of the law at T = 0, in δ^j T1, δ^j T2."""

    group: FormalGroupData
    r: int
    ring: JetRing
    components: list

    def apply(self, a, b, target):
        """[+](a, b) where a, b map j to polynomials of ``target``."""
        images = {}
        for j in range(1, self.r + 1):
            images[("T1", j)] = a[j]
            images[("T2", j)] = b[j]
        images[("T1", 0)] = target.zero()
        images[("T2", 0)] = target.zero()
        out = {}
        for i, Fi in enumerate(self.components, start=1):
            out[i] = Fi.substitute(images, target)
        return out

    def check_axioms(self):
        """Identity, commutativity and associativity of [+], symbolically at cutoff."""
        r = self.r
        tgt = JetRing(self.ring.coeffs, ("A", "B", "C"), order=r, flavor="p", cap=self.ring.cap, cap_kind="total")
        A = {j: tgt.gen("A", j) for j in range(1, r + 1)}
        B = {j: tgt.gen("B", j) for j in range(1, r + 1)}
        C = {j: tgt.gen("C", j) for j in range(1, r + 1)}
        Z = {j: tgt.zero() for j in range(1, r + 1)}
        ok = {}
        AZ = self.apply(A, Z, tgt)
        ok["identity"] = all(AZ[j] == A[j] for j in A)
        AB, BA = self.apply(A, B, tgt), self.apply(B, A, tgt)
        ok["commutative"] = all(AB[j] == BA[j] for j in A)
        left = self.apply(AB, C, tgt)
        right = self.apply(A, self.apply(B, C, tgt), tgt)
        ok["associative"] = all(left[j] == right[j] for j in A)
        return ok


def jet_ring_for_group(g, r, p, K, names=("T1", "T2")):
    return JetRing(PadicField(p, K), names, order=r, flavor="p", cap=g.cutoff, cap_kind="total")


def jet_group_law(g, r, p, K=30, method="tree"):
    """Prolong the law r times and set T1 = T2 = 0."""
    ring = jet_ring_for_group(g, r, p, K)
    F = _law_to_jet(g, ring)
    comps = []
    cur = F
    for _ in range(r):
        cur = prolong(cur, method)
        comps.append(_set_order0_zero(cur))
    return JetGroupLaw(g, r, ring, comps)


def _phi_r_T_at_zero(ring, r, var="T"):
    """{phi^r(T)}|_{T=0} in the jet ring (flavor decides lam)."""
    cur = ring.gen(var, 0)
    for _ in range(r):
        cur = frobenius_substitution(cur)
    return _set_order0_zero(cur)


def log_jets(g, r, p, K=30):
    """L^r_p = (1/p) {phi^r(l(T))}|_{T=0} as a jet polynomial in δT, ..., δ^r T.

    Since phi^r and T -> 0 are ring maps, this is (1/p) sum phi^r(a_n) w^n
    with w = {phi^r(T)}|_{T=0}.
    """
    if r < 1:
        raise ConfigError("r must be at least 1")
    ring = JetRing(PadicField(p, K), ("T",), order=r, flavor="p", cap=g.cutoff, cap_kind="total")
    w = _phi_r_T_at_zero(ring, r)
    acc = ring.zero()
    wn = ring.one()
    for a in g.log_coeffs:
        wn = wn * w
        if a:
            acc = acc + wn.scale(ring.coeffs(a).frobenius())
    L = acc / p
    for k, c in L.terms.items():
        if not c.is_zero() and c.valuation() < 0:
            raise IntegralityFailure("L^r_p is not integral", witness=L.ring_monomial_name(k))
    return L


def log_jets_homomorphism(L, law):
    """Check L([+](A, B)) = L(A) + L(B) symbolically at cutoff."""
    r = law.r
    tgt = JetRing(law.ring.coeffs, ("A", "B", "C"), order=r, flavor="p", cap=law.ring.cap, cap_kind="total")
    A = {j: tgt.gen("A", j) for j in range(1, r + 1)}
    B = {j: tgt.gen("B", j) for j in range(1, r + 1)}
    S = law.apply(A, B, tgt)

    def at(point):
        images = {("T", j): point[j] for j in range(1, r + 1)}
        images[("T", 0)] = tgt.zero()
        return L.substitute(images, tgt)

    return at(S) == at(A) + at(B)


def g_r_pi(r, Rpi, cutoff):
    """G_{r,pi} = (1/pi) {phi^r(T)}|_{T=0} in δ_pi variables, exact division checked."""
    ring = JetRing(Rpi, ("T",), order=r, flavor="pi", cap=cutoff, cap_kind="total")
    w = _phi_r_T_at_zero(ring, r)
    out = {}
    for k, c in w.terms.items():
        if not c.is_zero() and c.valuation() < Rpi.v_pi:
            raise DivisibilityFailure("phi^r(T) at T = 0 is not divisible by pi", witness=w.ring_monomial_name(k))
        out[k] = c * Rpi.inv_pi
    return JetPolynomial(ring, out), w


@dataclass
class LrPiResult:
    via_p: JetPolynomial
    via_g: JetPolynomial
    agree: bool
    integral: bool
    first_difference: str
    min_valuation: object


def l_r_pi(g, r, Rpi, K_check=8):
    """L^r_pi two ways: p_to_pi((p/pi) L^r_p) and sum phi^r(n a_n) pi^{n-1}/n G^n."""
    p = Rpi.p
    if Fraction(1, Rpi.e) < Fraction(1, p - 1):
        raise HypothesisViolation(f"v_p(pi) = 1/{Rpi.e} < 1/(p-1)")
    L = log_jets(g, r, p, Rpi.prec)
    Lc = L.change_ring(L.ring.derive(coeffs=Rpi), coeff_map=Rpi)
    via_p = p_to_pi(Lc.scale(Rpi(p) * Rpi.inv_pi))
    G, _ = g_r_pi(r, Rpi, g.cutoff)
    ring = G.ring
    acc = ring.zero()
    Gn = ring.one()
    pin = Rpi.one()
    for n, a in enumerate(g.log_coeffs, start=1):
        Gn = Gn * G
        if a:
            coef = Rpi(n * a).frobenius() * pin / n
            acc = acc + Gn.scale(coef)
        pin = pin * Rpi.pi
    via_g = acc
    via_p = via_p.change_ring(ring)
    agree = via_p.agrees_with(via_g, K_check)
    mv = via_g.min_valuation()
    return LrPiResult(via_p, via_g, agree, mv >= 0, via_p.first_difference(via_g, K_check), mv)


def minimal_integrality_exponent(poly, Rpi):
    """Least n >= 0 with p^n * p_to_pi(poly) integral."""
    rew = p_to_pi(poly, Rpi)
    m = rew.min_valuation()
    if m == inf:
        return 0
    n = 0
    while m + n < 0:
        n += 1
    return n


# ---------------------------------------------------------------------------
# The multiplicative delta characters
# ---------------------------------------------------------------------------


@dataclass
class PsiCharacters:
    psi_p: JetPolynomial
    psi_pi: JetPolynomial
    checks: dict


def _psi_poly(ring, lam_coeffs, var="x"):
    """sum_n c_n (δx / x^p)^n for n <= cap."""
    p = ring.p
    terms = {}
    for n, c in enumerate(lam_coeffs, start=1):
        key = [0] * ring.width
        key[ring.index(var, 0)] = -p * n
        key[ring.index(var, 1)] = n
        key = tuple(key)
        if ring.within_cap(key):
            terms[key] = c
    return JetPolynomial(ring, terms)


def psi_p_poly(ring, var="x"):
    p = ring.p
    R = ring.coeffs
    coeffs = [R(Fraction((-1) ** (n - 1) * p ** (n - 1), n)) for n in range(1, ring.cap + 1)]
    return _psi_poly(ring, coeffs, var)


def psi_pi_poly(ring, var="x"):
    R = ring.coeffs
    coeffs = []
    pin = R.one()
    for n in range(1, ring.cap + 1):
        coeffs.append(pin * R(Fraction((-1) ** (n - 1), n)))
        pin = pin * R.pi
    return _psi_poly(ring, coeffs, var)


def _homomorphism_check(psi, K_check):
    """psi(xy) = psi(x) + psi(y) with δ(xy) from the product rule."""
    R = psi.ring
    two = R.derive(variables=("x", "y"))
    x, y = two.gen("x"), two.gen("y")
    xy = x * y
    images = {("x", 0): xy, ("x", 1): prolong(xy)}
    lhs = psi.substitute(images, two)
    px = psi.change_ring(two)
    py = psi.substitute({("x", 0): y, ("x", 1): two.gen("y", 1)}, two)
    return lhs.agrees_with(px + py, K_check)


def _numeric_check(psi_p, p, K_check, rng):
    """psi(ab) = psi(a) + psi(b) at random points a, b = 1 mod p."""
    from .base_rings import delta_p

    Z = psi_p.ring.coeffs
    a = Z(1 + p * rng.randrange(1, p**4))
    b = Z(1 + p * rng.randrange(1, p**4))

    def val(u):
        return psi_p.evaluate({("x", 0): u, ("x", 1): delta_p(u)})

    lhs = val(a * b)
    rhs = val(a) + val(b)
    ident = val(Z(1))
    return (lhs - rhs).valuation() >= K_check and ident.is_zero()


def psi_characters(Rpi, D, K_check=8, seed=0):
    """psi_p and psi_pi on x with jet-degree cap D, and their identities."""
    p = Rpi.p
    if Fraction(1, Rpi.e) < Fraction(1, p - 1):
        raise HypothesisViolation(f"v_p(pi) = 1/{Rpi.e} < 1/(p-1)")
    base = Rpi.base
    ring_p = JetRing(base, ("x",), order=1, flavor="p", cap=D, cap_kind="jet")
    ring_pi = JetRing(Rpi, ("x",), order=1, flavor="pi", cap=D, cap_kind="jet")
    psp = psi_p_poly(ring_p)
    pspi = psi_pi_poly(ring_pi)
    checks = {}
    inc = pi_to_p(pspi)
    psp_R = psp.change_ring(inc.ring, coeff_map=Rpi)
    checks["p_psi_p_eq_pi_psi_pi"] = psp_R.scale(p).agrees_with(inc.scale(Rpi.pi), K_check)
    tr = inc.map_coefficients(Rpi.trace, ring=ring_p)
    tr_inv_pi = Rpi.trace(Rpi.inv_pi)
    checks["trace_identity"] = tr.agrees_with(psp.scale(tr_inv_pi * p), K_check)
    checks["homomorphism_p"] = _homomorphism_check(psp, K_check)
    checks["homomorphism_pi"] = _homomorphism_check(pspi, K_check)
    checks["numeric_p"] = _numeric_check(psp, p, K_check, random.Random(seed)) if isinstance(base, PadicField) else None
    return PsiCharacters(psp, pspi, checks)


def psi_series(coeffs, flavor, D, Q, order=1):
    """The series Psi = psi evaluated at x = q, as a QJetSeries."""
    from .jet_series import QJetSeries, series_ring

    ring = series_ring(coeffs, order=order, flavor=flavor, D=D)
    poly_ring = JetRing(coeffs, ("x",), order=order, flavor=flavor, cap=D, cap_kind="jet")
    poly = psi_p_poly(poly_ring) if flavor == "p" else psi_pi_poly(poly_ring)
    terms = {}
    for k, c in poly.terms.items():
        terms[k] = c
    s = QJetSeries.from_terms(ring, terms, Q=Q, q_min=-ring.p * D)
    return s
