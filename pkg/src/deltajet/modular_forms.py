"""Hecke eigen-systems and the δ-Fourier expansions attached to them.

Coefficients of classical q-series are kept as exact rationals
(:class:`QSeries`).  The δ-expansions are :class:`QJetSeries` over R_pi or
the unramified base.  Throughout this module a truncation ``Q`` is
inclusive: series carry the coefficients of q^0, ..., q^Q.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, inf

from .base_rings import RamifiedRing, is_prime
from .errors import (
    ConfigError,
    DivisibilityFailure,
    HypothesisViolation,
    IntegralityFailure,
    MalformedFile,
    RelationViolation,
)
from .jet_series import (
    QJetSeries,
    include_pi_into_p,
    monomial_label,
    overconvergence_defect,
    phi_on_series,
    series_ring,
    trace_series,
)
from .padic import vp_rational

__all__ = [
    "HeckeSystem",
    "CharacterEpsilon",
    "QSeries",
    "synthesize",
    "random_prime_values",
    "ingest",
    "write_coefficient_file",
    "hecke_T",
    "f_inverse_twist",
    "bracket_coefficients",
    "FSharpPi",
    "expansion_fsharp_pi",
    "Verdict",
    "congruence_mod_pi",
    "TauReport",
    "expansion_tau_and_fsharp_p",
    "bernoulli",
    "eisenstein_Ep1",
    "unit_root",
    "geometric_trace_forward",
    "gamma0N_reference_expansion",
    "random_system",
]


def primes_upto(n):
    return [k for k in range(2, n + 1) if is_prime(k)]


def factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class CharacterEpsilon:
    """The trivial primitive character mod M: 1 on integers prime to M, else 0."""

    M: int

    def __call__(self, A):
        return 1 if gcd(A, self.M) == 1 else 0


@dataclass
class QSeries:
    """Exact q-series sum_{m=0}^{Q} c_m q^m with rational coefficients."""

    coeffs: list

    @property
    def Q(self):
        return len(self.coeffs) - 1

    def __getitem__(self, m):
        return self.coeffs[m] if 0 <= m < len(self.coeffs) else Fraction(0)

    def __add__(self, other):
        n = min(len(self.coeffs), len(other.coeffs))
        return QSeries([self.coeffs[i] + other.coeffs[i] for i in range(n)])

    def __sub__(self, other):
        n = min(len(self.coeffs), len(other.coeffs))
        return QSeries([self.coeffs[i] - other.coeffs[i] for i in range(n)])

    def __mul__(self, other):
        if isinstance(other, QSeries):
            n = min(len(self.coeffs), len(other.coeffs))
            out = [Fraction(0)] * n
            for i, a in enumerate(self.coeffs[:n]):
                if a:
                    for j in range(n - i):
                        out[i + j] += a * other.coeffs[j]
            return QSeries(out)
        return QSeries([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, k):
        out = QSeries([Fraction(1)] + [Fraction(0)] * self.Q)
        for _ in range(k):
            out = out * self
        return out

    def truncate(self, Q):
        return QSeries(self.coeffs[: Q + 1])

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        n = min(len(self.coeffs), len(other.coeffs))
        return all(self.coeffs[i] == other.coeffs[i] for i in range(n))

    __hash__ = None

    def congruent(self, other, p, k=1):
        """Coefficientwise congruence modulo p^k."""
        n = min(len(self.coeffs), len(other.coeffs))
        return all(vp_rational(self.coeffs[i] - other.coeffs[i], p) >= k for i in range(n))

    def to_jet_series(self, ring):
        """Embed as a QJetSeries with no jet variables."""
        terms = {(m,): c for m, c in enumerate(self.coeffs) if c}
        return QJetSeries.from_terms(ring, terms, Q=self.Q + 1, q_min=0)


# ---------------------------------------------------------------------------
# Hecke systems
# ---------------------------------------------------------------------------


@dataclass
class HeckeSystem:
    """Coefficients a_1..a_Q of a normalized eigenform of level N p, weight kappa."""

    N: int
    p: int
    kappa: int
    a: list
    source: str = "synthetic"

    def __post_init__(self):
        if not is_prime(self.p):
            raise ConfigError(f"p = {self.p} is not prime")
        if self.N <= 4 or gcd(self.N, self.p) != 1:
            raise ConfigError(f"tame level N = {self.N} must exceed 4 and be prime to p = {self.p}")
        if self.kappa < 2:
            raise ConfigError("weight must be at least 2")
        self.a = [0] + [int(x) for x in self.a[1:]]

    @property
    def Q(self):
        return len(self.a) - 1

    def __getitem__(self, n):
        if n < 1:
            return 0
        if n > self.Q:
            raise IndexError(f"a_{n} beyond stored range {self.Q}")
        return self.a[n]

    def with_coefficient(self, n, value):
        """Copy with a_n replaced; the copy is not re-verified."""
        a = list(self.a)
        a[n] = value
        return HeckeSystem(self.N, self.p, self.kappa, a, self.source)

    def bad(self, l):
        return (self.N * self.p) % l == 0

    def expected(self, n):
        """a_n predicted from smaller coefficients by the Hecke relations."""
        if n == 1:
            return 1
        f = factorize(n)
        if len(f) > 1:
            l, k = next(iter(f.items()))
            m = l**k
            return self.a[m] * self.a[n // m]
        (l, k), = f.items()
        if k == 1:
            return self.a[n]
        if self.bad(l):
            return self.a[l] ** k
        return self.a[l] * self.a[n // l] - l ** (self.kappa - 1) * self.a[n // (l * l)]

    def verify(self, require_ap_one=False):
        """Raise RelationViolation at the first n where a relation fails."""
        for n in range(1, self.Q + 1):
            if self.a[n] != self.expected(n):
                raise RelationViolation(f"a_{n} = {self.a[n]} but the Hecke relations give {self.expected(n)}", n=n)
        if require_ap_one and self.Q >= self.p and self.a[self.p] != 1:
            raise RelationViolation(f"a_p = {self.a[self.p]}, expected 1", n=self.p)
        return True

    def as_qseries(self, Q=None):
        Q = self.Q if Q is None else Q
        return QSeries([Fraction(0)] + [Fraction(self.a[n]) for n in range(1, Q + 1)])


def random_prime_values(N, p, Q, rng):
    """a_l for primes l <= Q: a_p = 1, a_l = +-1 for l | N, |a_l| <= 2 sqrt(l) otherwise."""
    values = {}
    for l in primes_upto(Q):
        if l == p:
            values[l] = 1
        elif N % l == 0:
            values[l] = rng.choice((-1, 1))
        else:
            b = int(2 * l**0.5)
            values[l] = rng.randint(-b, b)
    return values


def synthesize(N, p, kappa, prime_values, Q):
    """Extend prime values to a_1..a_Q with the Hecke recursions."""
    a = [0] * (Q + 1)
    if Q >= 1:
        a[1] = 1
    proto = HeckeSystem(N, p, kappa, [0, 1], "synthetic")
    proto.a = a
    for n in range(2, Q + 1):
        f = factorize(n)
        if len(f) == 1 and list(f.values())[0] == 1:
            if n not in prime_values:
                raise ConfigError(f"no value given for the prime {n}")
            a[n] = int(prime_values[n])
        else:
            a[n] = proto.expected(n)
    h = HeckeSystem(N, p, kappa, a, "synthetic")
    h.verify()
    return h


def write_coefficient_file(h):
    lines = [f"# Hecke coefficients a_1..a_{h.Q}", f"{h.N} {h.p} {h.kappa} {h.Q} {h.source}"]
    lines += [f"{n} {h.a[n]}" for n in range(1, h.Q + 1)]
    return "\n".join(lines) + "\n"


def ingest(text, require_ap_one=False):
    """Parse a coefficient file and verify the Hecke relations."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise MalformedFile("empty coefficient file")
    lineno, head = rows[0]
    if len(head) != 5:
        raise MalformedFile(f"line {lineno}: header must be 'N p kappa Q source'")
    try:
        N, p, kappa, Q = (int(x) for x in head[:4])
    except ValueError:
        raise MalformedFile(f"line {lineno}: non-integer header field") from None
    source = head[4]
    a = [None] * (Q + 1)
    for lineno, parts in rows[1:]:
        if len(parts) != 2:
            raise MalformedFile(f"line {lineno}: expected 'n a_n'")
        try:
            n, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedFile(f"line {lineno}: non-integer entry") from None
        if not 1 <= n <= Q:
            raise MalformedFile(f"line {lineno}: index {n} outside 1..{Q}")
        if a[n] is not None:
            raise MalformedFile(f"line {lineno}: duplicate index {n}")
        a[n] = v
    missing = [n for n in range(1, Q + 1) if a[n] is None]
    if missing:
        raise MalformedFile(f"missing coefficient a_{missing[0]}")
    a[0] = 0
    h = HeckeSystem(N, p, kappa, a, source)
    h.verify(require_ap_one)
    return h


# ---------------------------------------------------------------------------
# Hecke operators
# ---------------------------------------------------------------------------


def _as_qseries(s):
    if isinstance(s, QSeries):
        return s
    if isinstance(s, HeckeSystem):
        return s.as_qseries()
    if isinstance(s, QJetSeries):
        coeffs = {}
        for k, c in s.poly.terms.items():
            if any(k[1:]) and not c.is_zero():
                raise ConfigError("hecke_T acts on pure q-series; jet variables present")
            coeffs[k[0]] = Fraction(c.lift())
        Q = s.Q - 1 if s.Q != inf else max(coeffs, default=0)
        return QSeries([coeffs.get(m, Fraction(0)) for m in range(Q + 1)])
    if isinstance(s, (list, tuple)):
        return QSeries([Fraction(c) for c in s])
    raise ConfigError(f"cannot read {type(s).__name__} as a q-series")


def hecke_T(kappa, M, n, s):
    """T_{kappa,M}(n) on sum a_m q^m; the output keeps m <= Q // n."""
    s = _as_qseries(s)
    eps = CharacterEpsilon(M)
    Q = s.Q
    out = []
    for m in range(Q // n + 1):
        g = n if m == 0 else gcd(n, m)
        total = Fraction(0)
        for A in range(1, g + 1):
            if g % A == 0 and eps(A):
                total += A ** (kappa - 1) * s[m * n // (A * A)]
        out.append(total)
    return QSeries(out)


def f_inverse_twist(h, Q=None):
    """sum over n <= Q prime to p of (a_n / n) q^n."""
    Q = h.Q if Q is None else Q
    return QSeries([Fraction(0)] + [Fraction(h[n], n) if n % h.p else Fraction(0) for n in range(1, Q + 1)])


# ---------------------------------------------------------------------------
# The expansion of f#_pi and its consequences
# ---------------------------------------------------------------------------


def bracket_coefficients(h, Q, D):
    """r_{m,i} with sum (a_n/n)(q^p + L)^n - p sum (a_n/n) q^n = sum r_{m,i} q^m L^i.

    Valid for any L; exponents m <= Q and i <= D.
    """
    p = h.p
    need = max(Q, Q // p + D)
    if h.Q < need:
        raise ConfigError(f"Hecke system must reach a_{need}")
    r = {}
    for n in range(1, need + 1):
        an = h[n]
        if not an:
            continue
        for i in range(0, min(n, D) + 1):
            m = p * (n - i)
            if m > Q:
                continue
            c = Fraction(an, n) * comb(n, i)
            r[(m, i)] = r.get((m, i), 0) + c
    for m in range(1, Q + 1):
        if h[m]:
            r[(m, 0)] = r.get((m, 0), 0) - p * Fraction(h[m], m)
    return {k: v for k, v in r.items() if v}


def _series_from(ring, terms, Q):
    return QJetSeries.from_terms(ring, terms, Q=Q + 1, q_min=0)


@dataclass
class FSharpPi:
    series: QJetSeries
    via_phi: QJetSeries
    via_p: QJetSeries
    forms_agree: dict
    integral: bool
    min_valuation: object
    stamp: dict


def _min_valuation(series):
    m, w = inf, None
    for k in sorted(series.poly.terms):
        c = series.poly.terms[k]
        if c.is_zero():
            continue
        if c.valuation() < m:
            m, w = c.valuation(), monomial_label(k)
    return m, w


def expansion_fsharp_pi(h, Rpi, Q, D, K_check=8):
    """E(f#_pi) = (1/pi)(phi - p) sum (a_n/n) q^n, computed three ways."""
    if not isinstance(Rpi, RamifiedRing):
        raise ConfigError("expansion_fsharp_pi needs R_pi coefficients")
    if Rpi.p != h.p:
        raise ConfigError("prime mismatch between ring and Hecke system")
    p = h.p
    br = bracket_coefficients(h, Q, D)
    ring_pi = series_ring(Rpi, order=1, flavor="pi", D=D)
    ring_p = series_ring(Rpi, order=1, flavor="p", D=D)
    inv_pi = Rpi.inv_pi
    main = _series_from(ring_pi, {k: Rpi(c) * Rpi.pi_power(k[1]) * inv_pi for k, c in br.items()}, Q)
    via_p = _series_from(ring_p, {k: Rpi(c * p ** k[1]) * inv_pi for k, c in br.items()}, Q)
    s = _series_from(ring_pi, {(n,): Fraction(h[n], n) for n in range(1, Q + 1) if h[n]}, Q)
    via_phi = (phi_on_series(s, Q_out=Q + 1) - s * Rpi(p)) * inv_pi
    agree = {
        "phi_form": main.agrees_with(via_phi, K_check),
        "p_form": include_pi_into_p(main).agrees_with(via_p, K_check),
    }
    mv, witness = _min_valuation(main)
    stamp = dict(main.trunc.stamp(), K_check=K_check)
    if mv < 0:
        raise IntegralityFailure(f"E(f#_pi) has a coefficient of valuation {mv}", witness=witness)
    return FSharpPi(main, via_phi, via_p, agree, True, mv, stamp)


@dataclass
class Verdict:
    name: str
    passed: bool
    witness: object = None
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {"check": self.name, "passed": self.passed, "witness": self.witness, **self.detail}


def trei_closed_form(h, ring, Q):
    """(sum a_n q^{np}) δq / q^p - (sum a_n q^{np^2}) (δq / q^p)^p."""
    p = h.p
    terms = {}
    for n in range(1, Q // p + 2):
        m = p * (n - 1)
        if m <= Q and h[n]:
            terms[(m, 1)] = terms.get((m, 1), 0) + h[n]
        m2 = p * p * (n - 1)
        if m2 <= Q and ring.cap >= p and h[n]:
            terms[(m2, p)] = terms.get((m2, p), 0) - h[n]
    return _series_from(ring, terms, Q)


def _first_nondivisible(diff, bound):
    for k in sorted(diff.poly.terms, key=lambda k: (sum(k[1:]), k[0])):
        c = diff.poly.terms[k]
        v = c.absprec if c.is_zero() else c.valuation()
        if v < bound:
            return monomial_label(k), v
    return None, None


def congruence_mod_pi(h, fs, Q):
    """E(f#_pi) agrees with the closed form modulo pi."""
    E = fs.series
    Rpi = E.ring.coeffs
    rhs = trei_closed_form(h, E.ring, Q)
    w, v = _first_nondivisible(E - rhs, Rpi.v_pi)
    return Verdict("congruence-mod-pi", w is None, w, {"valuation": None if v is None else str(v), "truncation": fs.stamp})


@dataclass
class TauReport:
    tau: QJetSeries
    closed_form: QJetSeries
    fsharp_p: QJetSeries
    verdicts: list
    defect: object

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts)


def expansion_tau_and_fsharp_p(h, fs, Q, K_check=8):
    """The trace of E(f#_pi), its closed form, f#_p = (2/p) tau and the mod-p congruence."""
    E = fs.series
    Rpi = E.ring.coeffs
    p = h.p
    base = Rpi.base
    D = E.ring.cap
    tau = trace_series(include_pi_into_p(E))
    ring_p = tau.ring
    br = bracket_coefficients(h, Q, D)
    half = Fraction(p - 1, 2)
    closed = _series_from(ring_p, {k: base(half * c * p ** k[1]) for k, c in br.items()}, Q)
    stamp = dict(tau.trunc.stamp(), K_check=K_check)
    verdicts = []
    w = tau.first_difference(closed, K_check)
    verdicts.append(Verdict("tau-closed-form", w is None, w, {"truncation": stamp}))
    w, v = _first_nondivisible(tau, 1)
    verdicts.append(Verdict("tau-divisible-by-p", w is None, w, {"truncation": stamp}))
    fsp = tau * base(Fraction(2, p))
    target = f_inverse_twist(h, Q).to_jet_series(ring_p)
    shifted = _series_from(ring_p, {(p * (n - 1), 1): h[n] for n in range(1, Q // p + 2) if p * (n - 1) <= Q and h[n]}, Q)
    target = target - shifted
    w, v = _first_nondivisible(fsp - target, 1)
    verdicts.append(Verdict("fsharp-p-congruence-mod-p", w is None, w, {"truncation": stamp}))
    rep = overconvergence_defect(fsp, Rpi)
    verdicts.append(Verdict("fsharp-p-defect-zero", rep.defect == 0, rep.witness, rep.as_dict()))
    return TauReport(tau, closed, fsp, verdicts, rep)


# ---------------------------------------------------------------------------
# E_{p-1} and its unit root
# ---------------------------------------------------------------------------


def bernoulli(n):
    """B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return B[n]


def sigma(k, n):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def eisenstein_Ep1(p, Q):
    """E_{p-1} = 1 - (2(p-1)/B_{p-1}) sum sigma_{p-2}(n) q^n, exactly."""
    k = p - 1
    c = Fraction(2 * k) / bernoulli(k)
    if vp_rational(c, p) < 1:
        raise DivisibilityFailure(f"2(p-1)/B_(p-1) = {c} is not divisible by p")
    return QSeries([Fraction(1)] + [-c * sigma(k - 1, n) for n in range(1, Q + 1)])


def unit_root(s, m, p):
    """The unique m-th root of s that is 1 mod p, solved coefficient by coefficient."""
    if gcd(m, p) != 1:
        raise HypothesisViolation("m must be prime to p")
    c = s.coeffs
    if c[0] != 1 or any(vp_rational(x, p) < 1 for x in c[1:]):
        raise HypothesisViolation("the series is not 1 mod p")
    Q = s.Q
    eps = [Fraction(1)] + [Fraction(0)] * Q
    for k in range(1, Q + 1):
        power = QSeries(eps[:k] + [Fraction(0)] * (Q + 1 - k)) ** m
        eps[k] = (c[k] - power.coeffs[k]) / m
    return QSeries(eps)


def geometric_trace_forward(components, eps):
    """sum_kappa c_kappa eps^kappa for components c_0, ..., c_{p-2}."""
    if not components:
        raise ConfigError("no components given")
    ring = components[0].ring
    e = eps.to_jet_series(ring) if isinstance(eps, QSeries) else eps
    acc = components[0]
    power = None
    for c in components[1:]:
        power = e if power is None else power * e
        acc = acc + c * power
    return acc


def gamma0N_reference_expansion(h, base, Q, D=None):
    """f^(-1) - a_p (sum a_m q^{mp}) δq/q^p + (sum a_m q^{mp^2}) (δq/q^p)^p, reduced mod p.

    A reference expansion for comparison; no modular parametrization is involved.
    """
    p = h.p
    D = p if D is None else D
    ring = series_ring(base, order=1, flavor="p", D=D)
    terms = {}
    for n in range(1, Q + 1):
        if n % p and h[n]:
            terms[(n, 0)] = Fraction(h[n], n)
    ap = h[p] if h.Q >= p else 0
    for m in range(1, Q // p + 2):
        e = p * (m - 1)
        if e <= Q and h[m]:
            terms[(e, 1)] = terms.get((e, 1), 0) - ap * h[m]
        e2 = p * p * (m - 1)
        if e2 <= Q and D >= p and h[m]:
            terms[(e2, p)] = terms.get((e2, p), 0) + h[m]
    reduced = {}
    for k, c in terms.items():
        c = Fraction(c)
        r = (c.numerator * pow(c.denominator, -1, p)) % p
        if r:
            reduced[k] = r
    return _series_from(ring, reduced, Q)


def random_system(N, p, Q, seed, kappa=2):
    """A synthetic system with a_p = 1 from a seeded generator."""
    rng = random.Random(seed)
    return synthesize(N, p, kappa, random_prime_values(N, p, Q, rng), Q)
