"""Jet polynomials and the prolongation engine.

A :class:`JetRing` is the free ring ``A[v, δv, ..., δ^r v]`` over a coefficient
ring ``A`` for a list of variables ``v``.  Its flavor is ``"p"`` or ``"pi"`` and
fixes lam, the constant in ``phi(y) = y^p + lam * δy``.  An optional degree cap
truncates every product.  With ``cap_kind="total"`` all variables have weight 1.
With ``cap_kind="jet"`` only the δ^j v with j >= 1 count, and then the order 0
variables may carry negative exponents.  Both filtrations are stable under δ
and phi, so truncated results are exact in the quotient ring.

The main operations are

* :func:`prolong`: δ of a polynomial built from the derivation axioms;
* :func:`frobenius_substitution`: the ring endomorphism phi, used as an oracle;
* :func:`conversion_polynomial`: the polynomial F_n that expresses δ_pi^n f
  through δ_p f, ..., δ_p^n f;
* :func:`pi_to_p` and :func:`p_to_pi`, the two coordinate changes;
* :func:`conjugate_apply` and :func:`weight_action`.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, inf

from .base_rings import RamifiedElement, RamifiedRing
from .errors import ConfigError, DivisibilityFailure, IntegralityFailure, OrderOverflow
from .padic import Padic

__all__ = [
    "JetRing",
    "JetPolynomial",
    "Weight",
    "prolong",
    "phi_hat",
    "frobenius_substitution",
    "conversion_polynomial",
    "ConversionData",
    "pi_to_p",
    "p_to_pi",
    "conjugate_apply",
    "conjugate_images",
    "weight_action",
    "gen_binomial",
]


def gen_binomial(n, k):
    """Binomial coefficient C(n, k) for any integer n and k >= 0."""
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k)
    return (-1) ** k * comb(k - n - 1, k)


def jet_name(var, j):
    if j == 0:
        return var
    if j == 1:
        return f"d{var}"
    return f"d{j}{var}"


class JetRing:
    """Coefficient ring, variables, order r, flavor and degree cap."""

    def __init__(self, coeffs, variables=("x",), order=1, flavor="p", cap=None, cap_kind="jet"):
        if flavor not in ("p", "pi"):
            raise ConfigError(f"flavor must be 'p' or 'pi', got {flavor!r}")
        if flavor == "pi" and not isinstance(coeffs, RamifiedRing):
            raise ConfigError("the pi flavor needs a ramified coefficient ring")
        if cap_kind not in ("jet", "total"):
            raise ConfigError("cap_kind must be 'jet' or 'total'")
        if order < 0:
            raise ConfigError("order must be nonnegative")
        self.coeffs = coeffs
        self.variables = tuple(variables)
        self.order = order
        self.flavor = flavor
        self.cap = cap
        self.cap_kind = cap_kind
        self.p = coeffs.p
        self.width = len(self.variables) * (order + 1)
        if flavor == "p":
            self.lam = coeffs(self.p)
        else:
            self.lam = coeffs.pi
        self.lam_inv = coeffs.inv_pi if flavor == "pi" else None
        if cap_kind == "total":
            self._wt = tuple(range(self.width))
        else:
            self._wt = tuple(i for i in range(self.width) if i % (order + 1))
        self._zero_key = (0,) * self.width
        self.keep_below = coeffs.prec

    def _sig(self):
        return (id(self.coeffs), self.variables, self.order, self.flavor, self.cap, self.cap_kind)

    def __eq__(self, other):
        return isinstance(other, JetRing) and self._sig() == other._sig()

    def __hash__(self):
        return hash(self._sig())

    def __repr__(self):
        return (
            f"JetRing(vars={self.variables}, r={self.order}, flavor={self.flavor}, "
            f"cap={self.cap}/{self.cap_kind}, coeffs={self.coeffs!r})"
        )

    def derive(self, **changes):
        """A ring with the same data except for the given fields."""
        kw = dict(
            coeffs=self.coeffs,
            variables=self.variables,
            order=self.order,
            flavor=self.flavor,
            cap=self.cap,
            cap_kind=self.cap_kind,
        )
        kw.update(changes)
        return JetRing(**kw)

    # -- indices ------------------------------------------------------------
    def index(self, var, j=0):
        if j > self.order:
            raise OrderOverflow(f"δ^{j} {var} exceeds the ring order {self.order}")
        return self.variables.index(var) * (self.order + 1) + j

    def decode(self, i):
        return self.variables[i // (self.order + 1)], i % (self.order + 1)

    def degree(self, key):
        return sum(key[i] for i in self._wt)

    def within_cap(self, key):
        return self.cap is None or self.degree(key) <= self.cap

    # -- constructors -------------------------------------------------------
    def zero(self):
        return JetPolynomial(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        c = self.coeffs(c)
        return JetPolynomial(self, {self._zero_key: c})

    def gen(self, var=None, j=0):
        var = self.variables[0] if var is None else var
        key = [0] * self.width
        key[self.index(var, j)] = 1
        key = tuple(key)
        if not self.within_cap(key):
            return self.zero()
        return JetPolynomial(self, {key: self.coeffs.one()})

    def monomial(self, exps, coeff=1):
        """``exps`` maps (var, j) to an exponent."""
        key = [0] * self.width
        for (var, j), n in exps.items():
            key[self.index(var, j)] = n
        key = tuple(key)
        if not self.within_cap(key):
            return self.zero()
        return JetPolynomial(self, {key: self.coeffs(coeff)})

    def __call__(self, x):
        if isinstance(x, JetPolynomial):
            if x.ring == self:
                return x
            return x.change_ring(self)
        return self.const(x)


def _is_kept(c, keep_below):
    if not c.is_zero():
        return True
    return c.absprec < keep_below


class JetPolynomial:
    """Sparse polynomial: exponent tuple -> coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms, clean=True):
        self.ring = ring
        if clean:
            kb = ring.keep_below
            terms = {k: c for k, c in terms.items() if _is_kept(c, kb)}
        self.terms = terms

    # -- basic queries -----------------------------------------------------
    def is_zero(self):
        return all(c.is_zero() for c in self.terms.values())

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def coefficient(self, exps):
        key = [0] * self.ring.width
        for (var, j), n in exps.items():
            key[self.ring.index(var, j)] = n
        c = self.terms.get(tuple(key))
        return self.ring.coeffs.zero() if c is None else c

    def constant_term(self):
        c = self.terms.get(self.ring._zero_key)
        return self.ring.coeffs.zero() if c is None else c

    def max_degree(self):
        return max((self.ring.degree(k) for k, c in self.terms.items() if not c.is_zero()), default=-inf)

    def total_degree(self):
        return max((sum(k) for k, c in self.terms.items() if not c.is_zero()), default=-inf)

    def jet_degree(self):
        r1 = self.ring.order + 1
        return max(
            (sum(n for i, n in enumerate(k) if i % r1) for k, c in self.terms.items() if not c.is_zero()),
            default=-inf,
        )

    def max_order(self):
        r1 = self.ring.order + 1
        best = -1
        for k, c in self.terms.items():
            if c.is_zero():
                continue
            for i, n in enumerate(k):
                if n and i % r1 > best:
                    best = i % r1
        return best

    def min_valuation(self):
        """Certified lower bound for the coefficient valuations (inf for 0)."""
        best = inf
        for c in self.terms.values():
            v = c.absprec if c.is_zero() else c.valuation()
            if v < best:
                best = v
        return best

    def min_absprec(self):
        return min((c.absprec for c in self.terms.values()), default=inf)

    # -- arithmetic ----------------------------------------------------------
    def _scalar(self, x):
        return self.ring.coeffs(x)

    def __add__(self, other):
        if not isinstance(other, JetPolynomial):
            other = self.ring.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                out[k] = out[k] + c
            else:
                out[k] = c
        return JetPolynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return JetPolynomial(self.ring, {k: -c for k, c in self.terms.items()}, clean=False)

    def __sub__(self, other):
        if not isinstance(other, JetPolynomial):
            other = self.ring.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                out[k] = out[k] - c
            else:
                out[k] = -c
        return JetPolynomial(self.ring, out)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = self._scalar(c)
        return JetPolynomial(self.ring, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, JetPolynomial):
            if isinstance(other, (int, Fraction, Padic, RamifiedElement)) or hasattr(other, "frobenius"):
                return self.scale(other)
            return NotImplemented
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other, q_bound=None):
        """Truncated product; ``q_bound=(index, Q)`` drops exponents >= Q at index."""
        R = self.ring
        cap = R.cap
        wt = R._wt
        A = list(self.terms.items())
        B = list(other.terms.items())
        if len(A) > len(B):
            A, B = B, A
        degB = [sum(k[i] for i in wt) for k, _ in B] if cap is not None else None
        out = {}
        for ka, ca in A:
            da = sum(ka[i] for i in wt) if cap is not None else 0
            for idx, (kb, cb) in enumerate(B):
                if cap is not None and da + degB[idx] > cap:
                    continue
                if q_bound is not None and ka[q_bound[0]] + kb[q_bound[0]] >= q_bound[1]:
                    continue
                k = tuple([x + y for x, y in zip(ka, kb)])
                c = ca * cb
                if k in out:
                    out[k] = out[k] + c
                else:
                    out[k] = c
        return JetPolynomial(R, out)

    def __truediv__(self, other):
        if isinstance(other, JetPolynomial):
            return self * other.inverse()
        c = self._scalar(other)
        return JetPolynomial(self.ring, {k: v / c for k, v in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if len(self.terms) == 1:
            (k, c), = self.terms.items()
            key = tuple(x * n for x in k)
            if not self.ring.within_cap(key):
                return self.ring.zero()
            return JetPolynomial(self.ring, {key: c**n})
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self):
        """Inverse of c*M*(1 + h) with c*M the only degree-0 term and h nilpotent under the cap."""
        R = self.ring
        low = [(k, c) for k, c in self.terms.items() if R.degree(k) == 0 and not c.is_zero()]
        if len(low) != 1:
            raise ConfigError("only a unit times a monomial plus higher degree terms is invertible")
        k0, c0 = low[0]
        if any(n < 0 for i, n in enumerate(k0) if i % (R.order + 1)) or (
            R.cap_kind == "total" and any(k0)
        ):
            raise ConfigError("leading monomial is not invertible in this ring")
        lead_inv = JetPolynomial(R, {tuple(-x for x in k0): c0 ** -1})
        h = self * lead_inv - 1
        if h.is_zero():
            return lead_inv
        if R.cap is None:
            raise ConfigError("inverting a non-monomial needs a degree cap")
        acc = R.one()
        term = R.one()
        for _ in range(R.cap):
            term = -(term * h)
            if term.is_zero():
                break
            acc = acc + term
        return acc * lead_inv

    def __eq__(self, other):
        if not isinstance(other, JetPolynomial):
            other = self.ring.const(other)
        return (self - other).is_zero()

    __hash__ = None

    def agrees_with(self, other, absprec):
        """True when every coefficient of the difference is known and has v >= absprec.

        Raises PrecisionExhausted if some coefficient is not known that far.
        """
        from .errors import PrecisionExhausted

        diff = self - other
        for k, c in diff.terms.items():
            if c.is_zero():
                if c.absprec < absprec:
                    raise PrecisionExhausted(
                        f"coefficient of {self.ring_monomial_name(k)} known only to p^{c.absprec}"
                    )
            elif c.valuation() < absprec:
                return False
        return True

    def first_difference(self, other, absprec=None):
        """Monomial name of the first differing coefficient, or None."""
        diff = self - other
        for k in sorted(diff.terms, key=self._sort_key):
            c = diff.terms[k]
            if not c.is_zero() and (absprec is None or c.valuation() < absprec):
                return self.ring_monomial_name(k)
        return None

    # -- structure -------------------------------------------------------------
    def change_ring(self, target, coeff_map=None):
        """Move to ``target`` (same variables and order up to inclusion)."""
        src = self.ring
        if src.variables == target.variables and src.order == target.order:
            relabel = None
        else:
            relabel = []
            for i in range(src.width):
                var, j = src.decode(i)
                ok = var in target.variables and j <= target.order
                relabel.append(target.index(var, j) if ok else None)
        cm = coeff_map or target.coeffs
        out = {}
        for k, c in self.terms.items():
            if relabel is not None:
                nk = [0] * target.width
                for i, n in enumerate(k):
                    if n:
                        if relabel[i] is None:
                            raise OrderOverflow(f"{jet_name(*src.decode(i))} does not exist in the target ring")
                        nk[relabel[i]] = n
                nk = tuple(nk)
            else:
                nk = k
            if not target.within_cap(nk):
                continue
            out[nk] = cm(c)
        return JetPolynomial(target, out)

    def map_coefficients(self, fn, ring=None):
        ring = ring or self.ring
        return JetPolynomial(ring, {k: fn(c) for k, c in self.terms.items()})

    def truncate(self, cap):
        R = self.ring
        return JetPolynomial(R, {k: c for k, c in self.terms.items() if R.degree(k) <= cap})

    def filter(self, pred):
        return JetPolynomial(self.ring, {k: c for k, c in self.terms.items() if pred(k)}, clean=False)

    def derivative(self, var, j=0):
        R = self.ring
        i = R.index(var, j)
        out = {}
        for k, c in self.terms.items():
            n = k[i]
            if n:
                nk = list(k)
                nk[i] -= 1
                out[tuple(nk)] = c * n
        return JetPolynomial(R, out)

    def substitute(self, images, target, coeff_map=None):
        """Ring map sending δ^j v to ``images[(v, j)]`` (missing ones map to themselves)."""
        src = self.ring
        gens = []
        for i in range(src.width):
            var, j = src.decode(i)
            img = images.get((var, j))
            if img is None:
                img = target.gen(var, j)
            elif not isinstance(img, JetPolynomial):
                img = target.const(img)
            gens.append(img)
        cache = {}

        def power(i, n):
            key = (i, n)
            if key not in cache:
                if n == 1:
                    cache[key] = gens[i]
                elif n < 0:
                    cache[key] = power(i, -1) ** (-n) if n != -1 else gens[i].inverse()
                else:
                    h = n // 2
                    cache[key] = power(i, h) * power(i, n - h)
            return cache[key]

        cm = coeff_map or target.coeffs
        acc = {}
        for k, c in self.terms.items():
            term = None
            for i, n in enumerate(k):
                if n:
                    f = power(i, n)
                    term = f if term is None else term * f
            cc = cm(c)
            if term is None:
                term = target.const(cc)
            else:
                term = term.scale(cc)
            for tk, tc in term.terms.items():
                if tk in acc:
                    acc[tk] = acc[tk] + tc
                else:
                    acc[tk] = tc
        return JetPolynomial(target, acc)

    def evaluate(self, values):
        """Evaluate at a point: ``values[(v, j)]`` are coefficient ring elements."""
        R = self.ring
        pts = [R.coeffs(values[R.decode(i)]) if R.decode(i) in values else None for i in range(R.width)]
        acc = R.coeffs.zero()
        for k, c in self.terms.items():
            t = c
            for i, n in enumerate(k):
                if n:
                    if pts[i] is None:
                        raise KeyError(f"no value for {jet_name(*R.decode(i))}")
                    t = t * pts[i] ** n
            acc = acc + t
        return acc

    # -- printing --------------------------------------------------------------
    def _sort_key(self, k):
        return (sum(k), tuple(-x for x in k))

    def ring_monomial_name(self, k):
        R = self.ring
        parts = []
        for i, n in enumerate(k):
            if n:
                name = jet_name(*R.decode(i))
                parts.append(name if n == 1 else f"{name}^{n}")
        return "*".join(parts) if parts else "1"

    def dump(self):
        """Canonical text form: one ``monomial : digits`` line per term."""
        lines = []
        for k in sorted(self.terms, key=self._sort_key):
            c = self.terms[k]
            if c.is_zero():
                continue
            lines.append(f"{self.ring_monomial_name(k)} : {c.digit_string()}")
        return "\n".join(lines)

    def __repr__(self):
        parts = []
        for k in sorted(self.terms, key=self._sort_key):
            c = self.terms[k]
            if not c.is_zero():
                parts.append(f"({c!r})*{self.ring_monomial_name(k)}")
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# delta and phi
# ---------------------------------------------------------------------------


def coefficient_delta(ring, c):
    """(phi(c) - c^p)/lam on a coefficient, with an exact divisibility check."""
    p = ring.p
    diff = c.frobenius() - c**p
    if ring.flavor == "pi":
        res = diff * ring.lam_inv
    else:
        res = diff / p
    if not c.is_zero() and c.valuation() >= 0 and not diff.is_zero():
        if diff.valuation() < ring.lam.valuation():
            raise DivisibilityFailure("phi(c) - c^p is not divisible by lam", witness=c)
    return res


def _delta_power(ring, i, n):
    """δ(y^n) for the generator y at index i, as (y^n, δ(y^n))."""
    r1 = ring.order + 1
    j = i % r1
    if j == ring.order:
        raise OrderOverflow(f"δ of δ^{j} variables needs order {j + 1}")
    key = [0] * ring.width
    key[i] = n
    yn = JetPolynomial(ring, {tuple(key): ring.coeffs.one()})
    if n == 0:
        return yn, ring.zero()
    if n < 0:
        if j != 0:
            raise ConfigError("negative exponents are only allowed on order-0 variables")
        if ring.cap is None or ring.cap_kind != "jet":
            raise ConfigError("δ of a negative power needs a jet-degree cap")
        kmax = ring.cap
    else:
        kmax = n
    lam = ring.lam
    out = {}
    lam_pow = ring.coeffs.one()
    for k in range(1, kmax + 1):
        t = [0] * ring.width
        t[i] = ring.p * (n - k)
        t[i + 1] = k
        t = tuple(t)
        if ring.within_cap(t):
            out[t] = lam_pow * gen_binomial(n, k)
        lam_pow = lam_pow * lam
    return yn, JetPolynomial(ring, out)


def _product_rule(ring, a, da, b, db):
    p = ring.p
    return a * b, a**p * db + b**p * da + (da * db).scale(ring.lam)


def _delta_monomial_term(ring, key, c):
    """(c*M, δ(c*M)) for a single term."""
    acc, dacc = None, None
    for i, n in enumerate(key):
        if n:
            y, dy = _delta_power(ring, i, n)
            if acc is None:
                acc, dacc = y, dy
            else:
                acc, dacc = _product_rule(ring, acc, dacc, y, dy)
    cpoly = ring.const(c)
    dc = ring.const(coefficient_delta(ring, c))
    if acc is None:
        return cpoly, dc
    return _product_rule(ring, cpoly, dc, acc, dacc)


def sum_rule_correction(ring, a, b):
    """C_lam(a, b) = (a^p + b^p - (a + b)^p)/lam, expanded by binomials."""
    p = ring.p
    apow = [ring.one(), a]
    bpow = [ring.one(), b]
    for _ in range(2, p):
        apow.append(apow[-1] * a)
        bpow.append(bpow[-1] * b)
    acc = ring.zero()
    for k in range(1, p):
        coeff = ring.coeffs(-comb(p, k))
        coeff = coeff * ring.lam_inv if ring.flavor == "pi" else coeff / p
        acc = acc + (apow[k] * bpow[p - k]).scale(coeff)
    return acc


def prolong(x, method="tree"):
    """Apply δ (of the ring's flavor) to a jet polynomial.

    ``method="tree"`` combines the monomial terms with the sum rule in a
    balanced tree, ``"fold"`` combines them left to right, and
    ``"frobenius"`` returns (phi(x) - x^p)/lam computed by substitution.
    All three agree because the axioms are ring identities.
    """
    R = x.ring
    if method == "frobenius":
        diff = frobenius_substitution(x) - x ** R.p
        return _divide_by_lam(diff)
    items = sorted(((k, c) for k, c in x.terms.items() if not c.is_zero()), key=lambda kc: x._sort_key(kc[0]))
    if not items:
        return R.zero()
    pairs = [_delta_monomial_term(R, k, c) for k, c in items]
    if method == "fold":
        a, da = pairs[0]
        for b, db in pairs[1:]:
            a, da = a + b, da + db + sum_rule_correction(R, a, b)
        return da
    if method != "tree":
        raise ValueError(f"unknown prolongation method {method!r}")
    while len(pairs) > 1:
        nxt = []
        for i in range(0, len(pairs) - 1, 2):
            (a, da), (b, db) = pairs[i], pairs[i + 1]
            nxt.append((a + b, da + db + sum_rule_correction(R, a, b)))
        if len(pairs) % 2:
            nxt.append(pairs[-1])
        pairs = nxt
    return pairs[0][1]


def _divide_by_lam(poly):
    R = poly.ring
    vl = R.lam.valuation()
    out = {}
    for k, c in poly.terms.items():
        if not c.is_zero() and c.valuation() < vl:
            raise DivisibilityFailure(
                f"coefficient of {poly.ring_monomial_name(k)} is not divisible by lam",
                witness=poly.ring_monomial_name(k),
            )
        out[k] = c * R.lam_inv if R.flavor == "pi" else c / R.p
    return JetPolynomial(R, out)


def phi_generator_images(ring):
    images = {}
    for var in ring.variables:
        for j in range(ring.order + 1):
            y = ring.gen(var, j)
            if j < ring.order:
                images[(var, j)] = y ** ring.p + ring.gen(var, j + 1).scale(ring.lam)
            else:
                images[(var, j)] = None
    return images


def frobenius_substitution(x):
    """The ring endomorphism phi: δ^j v -> (δ^j v)^p + lam δ^{j+1} v, Frobenius on coefficients."""
    R = x.ring
    images = phi_generator_images(R)
    top = {(var, R.order) for var in R.variables}
    for k, c in x.terms.items():
        for i, n in enumerate(k):
            if n and R.decode(i) in top and not c.is_zero():
                raise OrderOverflow("phi of a top-order jet variable leaves the ring")
    images = {k: v for k, v in images.items() if v is not None}
    return x.substitute(images, R, coeff_map=lambda c: c.frobenius())


def phi_hat(x, method="tree"):
    """phi(x) = x^p + lam * δx."""
    R = x.ring
    return x ** R.p + prolong(x, method).scale(R.lam)


# ---------------------------------------------------------------------------
# Conversion between δ_pi and δ_p coordinates
# ---------------------------------------------------------------------------


@dataclass
class ConversionData:
    """E_n, F_n and the bookkeeping of the conversion at one order n."""

    n: int
    E: JetPolynomial
    F: JetPolynomial
    shift: int
    leading: RamifiedElement
    degree: int

    def report(self):
        return {
            "n": self.n,
            "pi_shift": self.shift,
            "degree": self.degree,
            "terms": len([c for c in self.F.terms.values() if not c.is_zero()]),
            "F": self.F.dump(),
        }


@lru_cache(maxsize=None)
def _conversion_table(Rpi, nmax):
    """E_0..E_nmax, the δ_pi^n v images in the δ_p ring over Rpi (variable v)."""
    ring = JetRing(Rpi, ("v",), order=nmax, flavor="p")
    E = [ring.gen("v", 0)]
    for n in range(1, nmax + 1):
        prev = E[-1]
        nxt = frobenius_substitution(prev.change_ring(ring)) - prev ** Rpi.p
        out = {}
        for k, c in nxt.terms.items():
            if not c.is_zero() and c.valuation() < Rpi.v_pi:
                raise DivisibilityFailure(
                    f"phi(E_{n - 1}) - E_{n - 1}^p not divisible by pi", witness=nxt.ring_monomial_name(k)
                )
            out[k] = c * Rpi.inv_pi
        E.append(JetPolynomial(ring, out))
    return ring, tuple(E)


def conversion_polynomial(n, Rpi, check=True):
    """F_n with δ_pi^n f = (p^n/pi^n) δ_p^n f + pi^{max(e-n,0)} F_n(δ_p f, ..., δ_p^{n-1} f)."""
    if n < 1:
        raise ConfigError("conversion polynomials start at n = 1")
    ring, E = _conversion_table(Rpi, n)
    En = E[n]
    p = Rpi.p
    lead = Rpi(p**n) * Rpi.inv_pi**n
    resid = En - ring.gen("v", n).scale(lead)
    shift = max(Rpi.e - n, 0)
    vshift = Fraction(shift, Rpi.e)
    scale = Rpi.inv_pi**shift
    out = {}
    for k, c in resid.terms.items():
        if c.is_zero():
            continue
        if c.valuation() < vshift:
            raise DivisibilityFailure(
                f"residual of δ_pi^{n} is not divisible by pi^{shift}", witness=resid.ring_monomial_name(k)
            )
        out[k] = c * scale
    F = JetPolynomial(ring, out)
    deg = F.total_degree()
    deg = 0 if deg == -inf else deg
    if check:
        if not F.constant_term().is_zero():
            raise IntegralityFailure("F_n has a constant term")
        if deg > p ** (n - 1):
            raise IntegralityFailure(f"deg F_{n} = {deg} exceeds p^{n - 1}")
        if F.min_valuation() < 0:
            raise IntegralityFailure("F_n is not integral")
        if F.coefficient({("v", n): 1}).is_zero() is False:
            raise IntegralityFailure("F_n involves δ^n")
    return ConversionData(n=n, E=En, F=F, shift=shift, leading=lead, degree=deg)


def _relabel_single(poly, target, var):
    """Move a polynomial in the one-variable ring ('v',) into ``target`` as ``var``."""
    src = poly.ring
    out = {}
    for k, c in poly.terms.items():
        nk = [0] * target.width
        ok = True
        for i, nexp in enumerate(k):
            if nexp:
                _, j = src.decode(i)
                if j > target.order:
                    ok = False
                    break
                nk[target.index(var, j)] = nexp
        if not ok:
            raise OrderOverflow("conversion needs a higher order than the target ring")
        nk = tuple(nk)
        if target.within_cap(nk):
            out[nk] = target.coeffs(c)
    return JetPolynomial(target, out)


def pi_to_p(x):
    """Rewrite a δ_pi jet polynomial in δ_p coordinates over the same R_pi."""
    R = x.ring
    if R.flavor != "pi":
        raise ConfigError("pi_to_p expects a pi-flavored polynomial")
    target = R.derive(flavor="p")
    if R.order == 0:
        return x.change_ring(target)
    _, E = _conversion_table(R.coeffs, R.order)
    images = {}
    for var in R.variables:
        for j in range(1, R.order + 1):
            images[(var, j)] = _relabel_single(E[j], target, var)
    return x.substitute(images, target)


@lru_cache(maxsize=None)
def _back_table(Rpi, nmax):
    """B_1..B_nmax: images of δ_p^n v in δ_pi coordinates (variable v, no cap)."""
    ring = JetRing(Rpi, ("v",), order=nmax, flavor="pi")
    p = Rpi.p
    B = [ring.gen("v", 0)]
    for n in range(1, nmax + 1):
        data = conversion_polynomial(n, Rpi, check=False)
        Fn = data.F
        src_ring = JetRing(Rpi, ("v",), order=n, flavor="p")
        Fn = Fn.change_ring(src_ring) if Fn.ring.order != n else Fn
        images = {("v", j): B[j] for j in range(1, n)}
        Fsub = Fn.substitute(images, ring) if not Fn.is_zero() else ring.zero()
        inner = ring.gen("v", n) - Fsub.scale(Rpi.pi**data.shift)
        B.append(inner.scale(Rpi.pi**n / Rpi(p**n)))
    return tuple(B)


def p_to_pi(x, Rpi=None):
    """Rewrite a δ_p jet polynomial in δ_pi coordinates; denominators are kept."""
    R = x.ring
    if R.flavor != "p":
        raise ConfigError("p_to_pi expects a p-flavored polynomial")
    if Rpi is None:
        if not isinstance(R.coeffs, RamifiedRing):
            raise ConfigError("p_to_pi needs the ramified ring")
        Rpi = R.coeffs
    target = R.derive(coeffs=Rpi, flavor="pi")
    if R.order == 0:
        return x.change_ring(target)
    B = _back_table(Rpi, R.order)
    images = {}
    for var in R.variables:
        for j in range(1, R.order + 1):
            images[(var, j)] = _relabel_single(B[j], target, var)
    return x.substitute(images, target, coeff_map=Rpi)


# ---------------------------------------------------------------------------
# Conjugate operators
# ---------------------------------------------------------------------------


def _phi_iterates(ring, var, upto):
    """phi^s(var) for s = 0..upto inside ``ring``."""
    out = [ring.gen(var, 0)]
    for _ in range(upto):
        out.append(frobenius_substitution(out[-1]))
    return out


def _phi_iterate_poly(poly, s):
    for _ in range(s):
        poly = frobenius_substitution(poly)
    return poly


def conjugate_images(j, ring, derivation):
    """Values ∂_j(δ^k v) for every variable v and k <= r.

    ``derivation`` maps each variable name to g_v, a polynomial in the order-0
    variables, so that ∂ = sum g_v d/dv.  For r = 1 the closed forms are used;
    otherwise the triangular system ∂_j(phi^s v) = [s == j] p^j phi^j(g_v) is
    solved over the fraction field and the answer is checked for integrality.
    """
    if ring.flavor != "p":
        raise ConfigError("conjugate operators are defined on δ_p jet rings")
    r = ring.order
    if not 0 <= j <= r:
        raise ConfigError(f"conjugate index {j} outside 0..{r}")
    p = ring.p
    out = {}
    for var in ring.variables:
        g = derivation.get(var)
        g = ring.zero() if g is None else ring(g)
        if r == 1:
            x = ring.gen(var, 0)
            if j == 0:
                out[(var, 0)] = g
                out[(var, 1)] = -(x ** (p - 1)) * g
            else:
                out[(var, 0)] = ring.zero()
                out[(var, 1)] = frobenius_substitution(g)
            continue
        if r > 1 and g.max_order() > 0:
            raise ConfigError("g_v must only involve order-0 variables")
        phis = _phi_iterates(ring.derive(order=r + 1), var, r)
        vals = []
        for s in range(r + 1):
            target = phis[s]
            rhs = ring.zero()
            if s == j:
                gj = g.change_ring(ring.derive(order=r + 1))
                rhs = _phi_iterate_poly(gj, j).scale(p**j).change_ring(ring)
            acc = rhs
            for k in range(s):
                dk = target.derivative(var, k).change_ring(ring)
                acc = acc - dk * vals[k]
            diag = target.derivative(var, s).constant_term()
            val = acc / diag
            if val.min_valuation() < 0:
                raise IntegralityFailure(
                    f"∂_{j}(δ^{s} {var}) has a denominator", witness=jet_name(var, s)
                )
            vals.append(val)
        for k in range(r + 1):
            out[(var, k)] = vals[k]
    return out


def conjugate_apply(j, x, derivation):
    """∂_j applied to a jet polynomial by the chain rule."""
    R = x.ring
    images = conjugate_images(j, R, derivation)
    acc = R.zero()
    for var in R.variables:
        for k in range(R.order + 1):
            d = x.derivative(var, k)
            if not d.is_zero():
                acc = acc + d * images[(var, k)]
    return acc


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Weight:
    """w = a_0 + a_1 phi + ... + a_r phi^r."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(a) for a in self.coeffs))

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Weight(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self):
        return Weight(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    @property
    def degree(self):
        return sum(self.coeffs)


def weight_action(x, w):
    """x^w = prod phi^i(x)^{a_i}."""
    R = x.ring
    acc = R.one()
    cur = x
    for i, a in enumerate(w.coeffs):
        if i > 0:
            cur = frobenius_substitution(cur)
        if a:
            acc = acc * cur**a
    return acc
