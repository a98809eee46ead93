"""Truncated expansion rings R((q))[δq, ..., δ^r q]^.

A :class:`QJetSeries` stores a jet polynomial in the single variable ``q``
(Laurent in q, degree-capped in the jet variables) together with a
:class:`SeriesTruncation`.  Coefficients of q^n for n >= Q are unknown;
``Q = inf`` marks an exact series.

Besides arithmetic, the module provides the phi-action, the inclusion of the
pi-flavored ring into the p-flavored one, the trace, and three tests on
δ_p-series: the defect at truncation, the radius estimate, and the
coefficientwise bound used for the overconvergence radius.
"""

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, inf

from .base_rings import PadicField, RamifiedRing, UnramifiedRing
from .delta_calculus import JetPolynomial, JetRing, gen_binomial, p_to_pi, pi_to_p
from .errors import ConfigError, MalformedFile, OrderOverflow, TruncationError
from .padic import parse_padic

__all__ = [
    "SeriesTruncation",
    "QJetSeries",
    "series_ring",
    "series_add",
    "series_mul",
    "scalar_mul",
    "phi_on_series",
    "include_pi_into_p",
    "trace_series",
    "OverconvergenceReport",
    "overconvergence_defect",
    "RadiusEstimate",
    "radius_estimate",
    "CaffReport",
    "caff_check",
    "parse_dump",
    "to_ramified",
    "monomial_label",
]


@dataclass(frozen=True)
class SeriesTruncation:
    """q_min <= exponents < Q, jet degree <= D, coefficients at precision K."""

    q_min: int
    Q: object
    D: int
    K: int

    def __post_init__(self):
        if self.D < 1:
            raise ConfigError("jet degree cap D must be at least 1")
        if self.q_min > 0 or (self.Q != inf and self.Q < 0):
            raise ConfigError("truncation must satisfy q_min <= 0 <= Q")

    def stamp(self):
        return {"Q": None if self.Q == inf else self.Q, "D": self.D, "K": self.K, "q_min": self.q_min}


def series_ring(coeffs, order=1, flavor="p", D=6):
    """The jet ring underlying a series: variable q, jet-degree cap D."""
    return JetRing(coeffs, ("q",), order=order, flavor=flavor, cap=D, cap_kind="jet")


class QJetSeries:
    """Truncated element of R((q))[δq, ..., δ^r q]^."""

    __slots__ = ("poly", "trunc")

    def __init__(self, poly, trunc):
        R = poly.ring
        if R.variables != ("q",) or R.cap_kind != "jet" or R.cap != trunc.D:
            raise ConfigError("series polynomials live in the q jet ring with cap D")
        terms = {}
        for k, c in poly.terms.items():
            n = k[0]
            if n >= trunc.Q:
                continue
            if n < trunc.q_min and not c.is_zero():
                raise TruncationError(f"q^{n} lies below q_min = {trunc.q_min}")
            terms[k] = c
        self.poly = JetPolynomial(R, terms, clean=False)
        self.trunc = trunc

    # -- construction ---------------------------------------------------------
    @classmethod
    def from_terms(cls, ring, terms, Q=inf, q_min=None):
        """``terms`` maps (n, b_1, ..., b_r) to coefficients."""
        r = ring.order
        out = {}
        lo = 0
        for key, c in terms.items():
            key = tuple(key) + (0,) * (r + 1 - len(key))
            if ring.degree(key) > ring.cap:
                continue
            c = ring.coeffs(c)
            out[key] = out[key] + c if key in out else c
            lo = min(lo, key[0])
        qm = lo if q_min is None else q_min
        return cls(JetPolynomial(ring, out), SeriesTruncation(qm, Q, ring.cap, ring.coeffs.prec))

    @classmethod
    def q_power(cls, ring, n, Q=inf):
        return cls.from_terms(ring, {(n,): 1}, Q=Q, q_min=min(0, n))

    @classmethod
    def jet(cls, ring, j=1, Q=inf):
        key = [0] * (ring.order + 1)
        key[j] = 1
        return cls.from_terms(ring, {tuple(key): 1}, Q=Q)

    @property
    def ring(self):
        return self.poly.ring

    @property
    def Q(self):
        return self.trunc.Q

    @property
    def flavor(self):
        return self.ring.flavor

    def with_poly(self, poly, Q=None, q_min=None):
        t = self.trunc
        Q = t.Q if Q is None else Q
        qm = t.q_min if q_min is None else q_min
        trunc = SeriesTruncation(qm, Q, poly.ring.cap, poly.ring.coeffs.prec)
        return QJetSeries(poly, trunc)

    def items(self):
        return self.poly.terms.items()

    def coefficient(self, n, *beta):
        key = (n,) + tuple(beta) + (0,) * (self.ring.order - len(beta))
        c = self.poly.terms.get(key)
        return self.ring.coeffs.zero() if c is None else c

    def min_q(self):
        return min((k[0] for k, c in self.items() if not c.is_zero()), default=inf)

    def is_zero(self):
        return self.poly.is_zero()

    def restrict(self, Q):
        """Forget terms at q^n, n >= Q."""
        return self.with_poly(self.poly, Q=min(self.Q, Q))

    # -- arithmetic ----------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, QJetSeries):
            raise TypeError("expected a QJetSeries")
        if self.ring != other.ring:
            if self.ring.flavor != other.ring.flavor:
                raise TruncationError("series flavors differ")
            raise TruncationError("series live in different rings (order, cap or coefficients differ)")

    def __add__(self, other):
        if not isinstance(other, QJetSeries):
            return self.with_poly(self.poly + other)
        self._check(other)
        return self.with_poly(self.poly + other.poly, Q=min(self.Q, other.Q), q_min=min(self.trunc.q_min, other.trunc.q_min))

    __radd__ = __add__

    def __neg__(self):
        return self.with_poly(-self.poly)

    def __sub__(self, other):
        if not isinstance(other, QJetSeries):
            return self.with_poly(self.poly - other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QJetSeries):
            return self.with_poly(self.poly.scale(other))
        self._check(other)
        va, vb = self.min_q(), other.min_q()
        if va == inf or vb == inf:
            Q = min(self.Q, other.Q)
            return self.with_poly(self.ring.zero(), Q=Q)
        Q = min(self.Q, other.Q, self.Q + vb, other.Q + va)
        qb = None if Q == inf else (0, Q)
        prod = self.poly.mul(other.poly, q_bound=qb)
        return self.with_poly(prod, Q=Q, q_min=min(self.trunc.q_min, other.trunc.q_min, va + vb))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("use inverse() for negative powers")
        result = self.with_poly(self.ring.one(), Q=inf)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, QJetSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def agrees_with(self, other, absprec):
        return self.poly.agrees_with(other.poly, absprec)

    def first_difference(self, other, absprec=None):
        diff = self - other
        for key in sorted(diff.poly.terms, key=_dump_key):
            c = diff.poly.terms[key]
            if not c.is_zero() and (absprec is None or c.valuation() < absprec):
                return monomial_label(key)
        return None

    # -- text form -----------------------------------------------------------------
    def dump(self, header=True):
        """Line-oriented dump: ``n b_1 .. b_r : digits`` sorted by (|β|, n, β)."""
        lines = []
        if header:
            R = self.ring
            cr = R.coeffs
            if isinstance(cr, RamifiedRing):
                kind = "ramified " + cr.eis.spec_string()
            elif isinstance(cr, UnramifiedRing):
                kind = "unramified " + ",".join(str(c) for c in cr.modulus)
            else:
                kind = "padic"
            Q = "inf" if self.Q == inf else str(self.Q)
            lines.append(f"# p {R.p} K {cr.prec} r {R.order} flavor {R.flavor} D {R.cap} Q {Q} q_min {self.trunc.q_min}")
            lines.append(f"# coefficients {kind}")
        for key in sorted(self.poly.terms, key=_dump_key):
            c = self.poly.terms[key]
            if c.is_zero():
                continue
            lines.append(" ".join(str(x) for x in key) + " : " + c.digit_string())
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"QJetSeries({self.poly!r} + O(q^{self.Q}))"


def _dump_key(key):
    return (sum(key[1:]), key[0], key[1:])


def monomial_label(key):
    """Human-readable label such as ``q^10*dq`` for an exponent key."""
    parts = []
    if key[0]:
        parts.append(f"q^{key[0]}")
    for j, b in enumerate(key[1:], start=1):
        if b:
            name = "dq" if j == 1 else f"d{j}q"
            parts.append(name if b == 1 else f"{name}^{b}")
    return "*".join(parts) if parts else "1"


def series_add(a, b):
    return a + b


def series_mul(a, b):
    return a * b


def scalar_mul(c, s):
    return s * c


# ---------------------------------------------------------------------------
# phi, inclusion, trace
# ---------------------------------------------------------------------------


def _phi_q_power(ring, n, Q):
    """phi(q)^n = sum_i C(n, i) lam^i q^{p(n-i)} (δq)^i, jet degree <= D."""
    p = ring.p
    lam = ring.lam
    out = {}
    lp = ring.coeffs.one()
    width = ring.width
    for i in range(0, ring.cap + 1):
        e = p * (n - i)
        if e < Q:
            key = [0] * width
            key[0] = e
            key[1] = i
            b = gen_binomial(n, i)
            if b:
                out[tuple(key)] = lp * b
        lp = lp * lam
        if n >= 0 and i >= n:
            break
    return JetPolynomial(ring, out)


def phi_on_series(s, Q_out=None):
    """phi on a series: q -> q^p + lam δq, δ^j q -> (δ^j q)^p + lam δ^{j+1} q.

    The result is known below q^{p(Q - D)}; ``Q_out`` may lower that bound.
    """
    R = s.ring
    p = R.p
    D = R.cap
    Qs = s.Q
    honest = inf if Qs == inf else p * (Qs - D)
    if Q_out is None:
        Q = honest
    elif Q_out > honest:
        warnings.warn(f"phi output clipped to q-precision {honest}", stacklevel=2)
        Q = honest
    else:
        Q = Q_out
    qb = None if Q == inf else (0, Q)
    jet_images = {}
    for j in range(1, R.order + 1):
        y = R.gen("q", j)
        if j < R.order:
            jet_images[j] = y**p + R.gen("q", j + 1).scale(R.lam)
        else:
            jet_images[j] = None
    cache = {}
    acc = {}
    for key, c in s.poly.terms.items():
        if c.is_zero():
            continue
        n = key[0]
        if n not in cache:
            cache[n] = _phi_q_power(R, n, Q)
        term = cache[n]
        for j, b in enumerate(key[1:], start=1):
            if b:
                img = jet_images[j]
                if img is None:
                    raise OrderOverflow(f"phi(δ^{j} q) needs δ^{j + 1} q")
                term = term.mul(img**b, q_bound=qb)
        term = term.scale(c.frobenius())
        for k, v in term.terms.items():
            acc[k] = acc[k] + v if k in acc else v
    q_min = min(s.trunc.q_min, p * (s.trunc.q_min - D))
    return s.with_poly(JetPolynomial(R, acc), Q=Q, q_min=q_min)


def include_pi_into_p(s):
    """Apply the coordinate change δ_pi^j q -> E_j term by term."""
    if s.flavor != "pi":
        raise ConfigError("include_pi_into_p expects a pi-flavored series")
    return s.with_poly(pi_to_p(s.poly))


def trace_series(s):
    """Coefficientwise trace R_pi -> base."""
    R = s.ring
    Rpi = R.coeffs
    if not isinstance(Rpi, RamifiedRing):
        raise ConfigError("trace_series expects coefficients in R_pi")
    target = R.derive(coeffs=Rpi.base)
    poly = JetPolynomial(target, {k: Rpi.trace(c) for k, c in s.poly.terms.items()})
    return s.with_poly(poly)


def to_ramified(s, Rpi):
    """View a series over the base as a series over R_pi."""
    if isinstance(s.ring.coeffs, RamifiedRing):
        return s
    target = s.ring.derive(coeffs=Rpi)
    return s.with_poly(s.poly.change_ring(target, coeff_map=Rpi))


# ---------------------------------------------------------------------------
# Overconvergence
# ---------------------------------------------------------------------------


@dataclass
class OverconvergenceReport:
    """Defect at truncation, with the rewritten series as witness."""

    defect: int
    min_valuation: object
    witness: str
    rewritten: QJetSeries
    stamp: dict

    @property
    def overconvergent(self):
        return self.defect == 0

    def as_dict(self):
        mv = self.min_valuation
        return {
            "defect": self.defect,
            "min_valuation": None if mv == inf else str(mv),
            "witness": self.witness,
            "truncation": self.stamp,
        }


def overconvergence_defect(s, Rpi):
    """Smallest nu >= 0 with p^nu * s in the image of the pi-jet ring, at truncation.

    The series is rewritten in δ_pi coordinates; nu = max(0, ceil(-m)) where m
    is the least coefficient valuation of the rewritten series.
    """
    if s.flavor != "p":
        raise ConfigError("the defect is defined for δ_p series")
    rew_poly = p_to_pi(s.poly, Rpi)
    rew = s.with_poly(rew_poly)
    m = inf
    witness = None
    for key in sorted(rew_poly.terms, key=_dump_key):
        c = rew_poly.terms[key]
        v = c.absprec if c.is_zero() else c.valuation()
        if v < m:
            m, witness = v, monomial_label(key)
    nu = 0 if m == inf else max(0, ceil(-m))
    return OverconvergenceReport(nu, m, witness, rew, s.trunc.stamp())


@dataclass
class RadiusEstimate:
    """Lower convex hull of (jet degree, least valuation) and its last slope."""

    points: list
    hull: list
    slope: object
    intercept: object

    def as_dict(self):
        f = lambda x: None if x is None else str(x)
        return {
            "points": [[d, str(m)] for d, m in self.points],
            "hull": [[d, str(m)] for d, m in self.hull],
            "slope": f(self.slope),
            "intercept": f(self.intercept),
        }


def lower_hull(points):
    """Lower convex hull (monotone chain) of points sorted by x."""
    hull = []
    for pt in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def degree_profile(s):
    """m(d): least coefficient valuation at each jet degree d."""
    m = {}
    for key, c in s.items():
        if c.is_zero():
            continue
        d = sum(key[1:])
        v = Fraction(c.valuation())
        if d not in m or v < m[d]:
            m[d] = v
    return m


def radius_estimate(s, slope=None):
    """Final hull slope C_est and intercept C' = max_d (C d - m(d)).

    The intercept is computed for ``slope`` when given, else for C_est.
    """
    m = degree_profile(s)
    if not m:
        raise ConfigError("radius estimate of the zero series")
    pts = sorted(m.items())
    hull = lower_hull(pts)
    if len(hull) >= 2:
        (x1, y1), (x2, y2) = hull[-2], hull[-1]
        c_est = Fraction(y2 - y1, 1) / (x2 - x1)
    else:
        c_est = None
    C = slope if slope is not None else c_est
    intercept = None if C is None else max(C * d - v for d, v in pts)
    return RadiusEstimate(pts, hull, c_est, intercept)


@dataclass
class CaffReport:
    passed: bool
    worst_margin: object
    worst_monomial: str
    violations: list
    defect: int
    threshold_slope: Fraction

    def as_dict(self):
        return {
            "passed": self.passed,
            "worst_margin": None if self.worst_margin == inf else str(self.worst_margin),
            "worst_monomial": self.worst_monomial,
            "violations": self.violations,
            "defect": self.defect,
            "threshold_slope": str(self.threshold_slope),
        }


def caff_check(s, r, Rpi, require_defect=True):
    """Check v_p(a_{n,β}) >= (1/e)(|β|/p^{r-1} - 1) on every coefficient."""
    e = Rpi.e
    p = Rpi.p
    if r > e - 1:
        raise ConfigError(f"the bound needs r <= e - 1, got r = {r}, e = {e}")
    if s.ring.order > r:
        raise ConfigError("series order exceeds r")
    defect = overconvergence_defect(s, Rpi).defect if require_defect else 0
    if defect:
        raise ConfigError(f"series has defect {defect}; the bound applies to defect 0")
    worst, worst_mono, violations = inf, None, []
    for key in sorted(s.poly.terms, key=_dump_key):
        c = s.poly.terms[key]
        if c.is_zero():
            continue
        b = sum(key[1:])
        bound = Fraction(1, e) * (Fraction(b, p ** (r - 1)) - 1)
        margin = c.valuation() - bound
        if margin < worst:
            worst, worst_mono = margin, monomial_label(key)
        if margin < 0:
            violations.append({"monomial": monomial_label(key), "valuation": str(c.valuation()), "bound": str(bound)})
    return CaffReport(not violations, worst, worst_mono, violations, defect, Fraction(1, p ** (r - 1) * e))


# ---------------------------------------------------------------------------
# Dump parsing
# ---------------------------------------------------------------------------


def parse_element(ring, text):
    """Inverse of ``digit_string`` for the coefficient ring ``ring``."""
    if isinstance(ring, PadicField):
        return parse_padic(ring, text)
    if isinstance(ring, UnramifiedRing):
        return ring.element([parse_padic(ring.scalars, t) for t in text.split(",")])
    if isinstance(ring, RamifiedRing):
        return ring.element([parse_element(ring.base, t) for t in text.split("|")])
    raise TypeError(f"unsupported coefficient ring {ring!r}")


def parse_dump(text, coeffs=None, make_ring=None):
    """Read a series dump.

    The header comments fix p, K, r, flavor, D, Q and q_min.  ``coeffs`` (a
    coefficient ring) overrides the header's coefficient description, and
    ``make_ring(header)`` may construct it from the header dictionary.
    """
    header = {}
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            toks = line[1:].split()
            if toks and toks[0] == "coefficients":
                header["coefficients"] = " ".join(toks[1:])
            else:
                for a, b in zip(toks[0::2], toks[1::2]):
                    header[a] = b
            continue
        if ":" not in line:
            raise MalformedFile(f"line {lineno}: missing ':'")
        left, right = line.split(":", 1)
        try:
            key = tuple(int(x) for x in left.split())
        except ValueError as exc:
            raise MalformedFile(f"line {lineno}: bad exponent list") from exc
        rows.append((lineno, key, right.strip()))
    for req in ("r", "flavor", "D"):
        if req not in header:
            raise MalformedFile(f"dump header lacks {req!r}")
    if coeffs is None:
        if make_ring is None:
            raise MalformedFile("no coefficient ring available for the dump")
        coeffs = make_ring(header)
    r = int(header["r"])
    D = int(header["D"])
    ring = series_ring(coeffs, order=r, flavor=header["flavor"], D=D)
    terms = {}
    for lineno, key, digits in rows:
        if len(key) != r + 1:
            raise MalformedFile(f"line {lineno}: expected {r + 1} exponents")
        try:
            terms[key] = parse_element(coeffs, digits)
        except (ValueError, IndexError) as exc:
            raise MalformedFile(f"line {lineno}: bad coefficient {digits!r}") from exc
    Q = header.get("Q", "inf")
    Q = inf if Q == "inf" else int(Q)
    q_min = int(header.get("q_min", min([k[0] for k in terms] + [0])))
    return QJetSeries(JetPolynomial(ring, terms), SeriesTruncation(q_min, Q, D, coeffs.prec)), header
