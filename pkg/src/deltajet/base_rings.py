"""Capped-precision base rings and the Fermat quotient operators on them.

Three kinds of ring are provided:

* ``PadicField`` (re-exported from :mod:`deltajet.padic`): Z_p inside Q_p,
  with the identity as Frobenius.
* ``UnramifiedRing``: Z_p[t]/(g) for a monic lift g of an irreducible
  polynomial over F_p.  The Frobenius sends t to the Hensel lift of t^p.
* ``RamifiedRing``: R[pi] for pi a root of an Eisenstein polynomial with
  integer coefficients.  Elements are pi-digit vectors, so the valuation is
  read off exactly.  The Frobenius fixes pi.

Every element type implements ``frobenius``, ``valuation``, ``absprec`` and
``is_zero``.  The module-level functions ``frobenius``, ``delta_p``,
``delta_pi``, ``valuation`` and ``trace`` dispatch on those methods.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, inf

from .errors import ConfigError, DivisibilityFailure, PrecisionExhausted
from .padic import Padic, PadicField, vp_int

__all__ = [
    "PadicConfig",
    "EisensteinConfig",
    "PadicField",
    "UnramifiedRing",
    "UnramifiedElement",
    "RamifiedRing",
    "RamifiedElement",
    "make_base_ring",
    "make_ramified_ring",
    "frobenius",
    "delta_p",
    "delta_pi",
    "valuation",
    "trace",
    "is_prime",
]


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PadicConfig:
    """Prime, working precision and inertia degree of the unramified base.

    ``modulus`` optionally fixes g(t) = t^f + g_{f-1} t^{f-1} + ... + g_0 by
    its non-leading integer coefficients (low degree first).
    """

    p: int
    K: int = 8
    f: int = 1
    modulus: tuple = None

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p) or self.p < 5:
            raise ConfigError(f"p must be a prime >= 5, got {self.p!r}")
        if not isinstance(self.K, int) or self.K < 1:
            raise ConfigError(f"precision K must be a positive integer, got {self.K!r}")
        if not isinstance(self.f, int) or self.f < 1:
            raise ConfigError(f"inertia degree must be >= 1, got {self.f!r}")
        if self.modulus is not None:
            object.__setattr__(self, "modulus", tuple(int(c) for c in self.modulus))
            if len(self.modulus) != self.f:
                raise ConfigError("modulus must have exactly f non-leading coefficients")

    def base_ring(self):
        return make_base_ring(self)


@dataclass(frozen=True)
class EisensteinConfig:
    """E(x) = x^e + a_{e-1} x^{e-1} + ... + a_0 with integer a_i.

    ``coeffs`` lists a_0, ..., a_{e-1}.  Every a_i must be divisible by p and
    a_0 must have p-adic valuation exactly 1.
    """

    coeffs: tuple
    galois_flag: bool = False
    label: str = "eisenstein"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise ConfigError("ramification degree e must be at least 2")

    @property
    def e(self):
        return len(self.coeffs)

    @classmethod
    def cyclotomic(cls, p):
        """Minimal polynomial of pi = 1 - zeta_p, i.e. Phi_p(1 - x)."""
        coeffs = tuple((-1) ** i * comb(p, i + 1) for i in range(p - 1))
        return cls(coeffs, galois_flag=True, label="cyclotomic")

    @classmethod
    def pure(cls, p, e):
        """x^e - p."""
        return cls((-p,) + (0,) * (e - 1), galois_flag=(e == 2), label=f"x^{e}-{p}")

    def validate(self, p):
        a = self.coeffs
        if any(c % p for c in a):
            raise ConfigError("Eisenstein coefficients must all be divisible by p")
        if a[0] % (p * p) == 0:
            raise ConfigError("constant term of an Eisenstein polynomial must have valuation 1")

    def power_sums(self, count):
        """Newton power sums s_0, ..., s_{count-1} of the roots of E."""
        e = self.e
        a = self.coeffs
        s = [e]
        for k in range(1, count):
            if k <= e:
                val = -k * a[e - k] - sum(a[e - i] * s[k - i] for i in range(1, k))
            else:
                val = -sum(a[e - i] * s[k - i] for i in range(1, e + 1))
            s.append(val)
        return s

    def spec_string(self):
        if self.label == "cyclotomic":
            return "cyclotomic"
        return "eisenstein:" + ",".join(str(c) for c in self.coeffs)

    @classmethod
    def parse(cls, text, p):
        """Parse ``cyclotomic``, ``sqrt`` or ``eisenstein:a0,a1,...``."""
        text = text.strip()
        if text == "cyclotomic":
            return cls.cyclotomic(p)
        if text == "sqrt":
            return cls.pure(p, 2)
        if text.startswith("eisenstein:"):
            try:
                coeffs = [int(c) for c in text.split(":", 1)[1].split(",") if c.strip()]
            except ValueError as exc:
                raise ConfigError(f"bad Eisenstein coefficient list {text!r}") from exc
            return cls(tuple(coeffs))
        raise ConfigError(f"unknown uniformizer choice {text!r}")


# ---------------------------------------------------------------------------
# Polynomials over F_p (used only to pick and check the modulus g)
# ---------------------------------------------------------------------------


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a, g, p):
    a = _trim([c % p for c in a])
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    while len(a) - 1 >= dg:
        c = (a[-1] * inv) % p
        shift = len(a) - 1 - dg
        for i, gi in enumerate(g):
            a[shift + i] = (a[shift + i] - c * gi) % p
        _trim(a)
    return a


def _fp_mulmod(a, b, g, p):
    r = [0] * max(len(a) + len(b) - 1, 0)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                r[i + j] += x * y
    return _fp_mod(r, g, p)


def _fp_powmod(a, n, g, p):
    result = [1]
    while n:
        if n & 1:
            result = _fp_mulmod(result, a, g, p)
        a = _fp_mulmod(a, a, g, p)
        n >>= 1
    return result


def _fp_gcd(a, b, p):
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def _prime_factors(n):
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def is_irreducible_mod_p(g, p):
    """Rabin's test for a monic g given low degree first (leading 1 included)."""
    f = len(g) - 1
    if f == 1:
        return True
    x = [0, 1]
    if _fp_powmod(x, p**f, g, p) != _fp_mod(x, g, p):
        return False
    for r in _prime_factors(f):
        h = _fp_powmod(x, p ** (f // r), g, p)
        h = h + [0] * (2 - len(h))
        h[1] -= 1
        if len(_fp_gcd(g, h, p)) > 1:
            return False
    return True


def find_irreducible(p, f):
    """First monic irreducible of degree f, scanning constant terms fastest."""
    for n in range(p**f):
        low = []
        m = n
        for _ in range(f):
            m, d = divmod(m, p)
            low.append(d)
        if low[0] == 0:
            continue
        if is_irreducible_mod_p(low + [1], p):
            return tuple(low)
    raise ConfigError(f"no irreducible polynomial of degree {f} mod {p}")


# ---------------------------------------------------------------------------
# Linear algebra over a valued field
# ---------------------------------------------------------------------------


def solve_linear(rows, rhs):
    """Solve ``rows @ y = rhs`` by elimination with minimal-valuation pivots."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        best, best_v = None, inf
        for i in range(col, n):
            if not a[i][col].is_zero():
                v = a[i][col].valuation()
                if v < best_v:
                    best, best_v = i, v
        if best is None:
            raise PrecisionExhausted("singular matrix at working precision")
        a[col], a[best] = a[best], a[col]
        piv = a[col][col]
        for i in range(col + 1, n):
            if a[i][col].is_zero():
                continue
            m = a[i][col] / piv
            a[i] = [x - m * y for x, y in zip(a[i], a[col])]
    y = [None] * n
    for i in reversed(range(n)):
        s = a[i][n]
        for j in range(i + 1, n):
            s = s - a[i][j] * y[j]
        y[i] = s / a[i][i]
    return y


def integer_determinant(matrix):
    """Exact determinant of an integer matrix (Fraction elimination)."""
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                k = m[r][c] / m[c][c]
                m[r] = [x - k * y for x, y in zip(m[r], m[c])]
    return int(det)


# ---------------------------------------------------------------------------
# Unramified extensions
# ---------------------------------------------------------------------------


class UnramifiedRing:
    """Z_p[t]/(g(t)) of degree f, with the Frobenius lift t -> theta."""

    def __init__(self, p, K, f, modulus=None):
        if f < 2:
            raise ConfigError("use PadicField for f = 1")
        self.p = p
        self.prec = K
        self.f = f
        self.scalars = PadicField(p, K)
        g = tuple(modulus) if modulus is not None else find_irreducible(p, f)
        if len(g) != f or not is_irreducible_mod_p(list(g) + [1], p):
            raise ConfigError(f"t^{f} + {g} is not irreducible mod {p}")
        self.modulus = g
        S = self.scalars
        top = [-c for c in g]
        red = {f: top}
        for k in range(f + 1, 2 * f - 1):
            prev = red[k - 1]
            lead = prev[-1]
            red[k] = [(prev[i - 1] if i else 0) + lead * top[i] for i in range(f)]
        self._red = {k: [S(c) for c in v] for k, v in red.items()}
        self._zero_digits = tuple(S.zero() for _ in range(f))
        self.theta = self._hensel_theta()
        self._theta_pows = [self.one()]
        for _ in range(1, f):
            self._theta_pows.append(self._theta_pows[-1] * self.theta)

    def __repr__(self):
        return f"UnramifiedRing(p={self.p}, K={self.prec}, f={self.f}, g={self.modulus})"

    @property
    def degree(self):
        return self.f

    def element(self, digits):
        return UnramifiedElement(self, tuple(digits))

    def __call__(self, x):
        if isinstance(x, UnramifiedElement):
            return x
        c = self.scalars(x)
        return UnramifiedElement(self, (c,) + self._zero_digits[1:])

    def zero(self):
        return UnramifiedElement(self, self._zero_digits)

    def one(self):
        return self(1)

    def gen(self):
        S = self.scalars
        return self.element([S(0), S(1)] + [S(0)] * (self.f - 2))

    def evaluate_g(self, x):
        acc = self.one()
        for c in reversed(self.modulus):
            acc = acc * x + c
        return acc

    def evaluate_dg(self, x):
        f = self.f
        coeffs = [c * i for i, c in enumerate(self.modulus)][1:] + [f]
        acc = self.zero()
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    def _hensel_theta(self):
        # Newton iteration from t^p; the root of g congruent to t^p mod p
        theta = self.gen() ** self.p
        for _ in range(2 * self.prec + 4):
            r = self.evaluate_g(theta)
            if r.is_zero():
                break
            theta = theta - r / self.evaluate_dg(theta)
        if not self.evaluate_g(theta).is_zero():
            raise PrecisionExhausted("Hensel lift of the Frobenius did not converge")
        return theta

    def random_element(self, rng, integral=True):
        S = self.scalars
        return self.element([S.random_integral(rng) for _ in range(self.f)])


class UnramifiedElement:
    __slots__ = ("parent", "c")

    def __init__(self, parent, c):
        self.parent = parent
        self.c = c

    def _co(self, other):
        if isinstance(other, UnramifiedElement):
            return other
        if isinstance(other, (int, Fraction, Padic)):
            return self.parent(other)
        return None

    def is_zero(self):
        return all(x.is_zero() for x in self.c)

    def valuation(self):
        return min(x.valuation() for x in self.c)

    @property
    def absprec(self):
        return min(x.absprec for x in self.c)

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return UnramifiedElement(self.parent, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return UnramifiedElement(self.parent, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return UnramifiedElement(self.parent, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Padic)):
            s = self.parent.scalars(other)
            return UnramifiedElement(self.parent, tuple(a * s for a in self.c))
        if not isinstance(other, UnramifiedElement):
            return NotImplemented
        R = self.parent
        f = R.f
        zero = R.scalars.zero()
        r = [zero] * (2 * f - 1)
        for i, a in enumerate(self.c):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(other.c):
                r[i + j] = r[i + j] + a * b
        for k in range(2 * f - 2, f - 1, -1):
            top = r[k]
            if top.is_exact_zero():
                continue
            red = R._red[k]
            for i in range(f):
                r[i] = r[i] + top * red[i]
        return UnramifiedElement(R, tuple(r[:f]))

    __rmul__ = __mul__

    def inverse(self):
        R = self.parent
        f = R.f
        cols = []
        basis = R.one()
        g = R.gen()
        for _ in range(f):
            cols.append((self * basis).c)
            basis = basis * g
        rows = [[cols[j][i] for j in range(f)] for i in range(f)]
        S = R.scalars
        y = solve_linear(rows, [S.one()] + [S.zero()] * (f - 1))
        return R.element(y)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Padic)):
            s = self.parent.scalars(other)
            return UnramifiedElement(self.parent, tuple(a / s for a in self.c))
        if not isinstance(other, UnramifiedElement):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.parent.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    def frobenius(self):
        R = self.parent
        acc = UnramifiedElement(R, (self.c[0],) + R._zero_digits[1:])
        for ci, tp in zip(self.c[1:], R._theta_pows[1:]):
            if not ci.is_exact_zero():
                acc = acc + tp * ci
        return acc

    def digit_string(self):
        return ",".join(x.digit_string() for x in self.c)

    def __repr__(self):
        return "[" + ", ".join(repr(x) for x in self.c) + "]"


# ---------------------------------------------------------------------------
# Eisenstein extensions
# ---------------------------------------------------------------------------


class RamifiedRing:
    """R_pi = base[pi] with pi a root of an Eisenstein polynomial."""

    def __init__(self, base, eis):
        eis.validate(base.p)
        self.base = base
        self.eis = eis
        self.p = base.p
        self.prec = base.prec
        self.e = eis.e
        e = self.e
        a = eis.coeffs
        B = base
        self._bzero = B.zero()
        # pi^k for e <= k <= 2e-2 in the pi-digit basis
        top = [-c for c in a]
        red = {e: top}
        for k in range(e + 1, 2 * e - 1):
            prev = red[k - 1]
            lead = prev[-1]
            red[k] = [(prev[i - 1] if i else 0) + lead * top[i] for i in range(e)]
        self._red_int = red
        self._red = {k: [B(c) for c in v] for k, v in red.items()}
        self.power_sums = eis.power_sums(2 * e - 1)
        self._psums = [B(s) for s in self.power_sums]
        self.pi = self.element([B(0), B(1)] + [B(0)] * (e - 2))
        # 1/pi = -(pi^{e-1} + a_{e-1} pi^{e-2} + ... + a_1) / a_0
        inv = [B(Fraction(-a[i + 1], a[0])) for i in range(e - 1)] + [B(Fraction(-1, a[0]))]
        self.inv_pi = self.element(inv)
        self.v_pi = Fraction(1, e)

    def __repr__(self):
        return f"RamifiedRing(p={self.p}, K={self.prec}, E={self.eis.spec_string()})"

    def element(self, digits):
        return RamifiedElement(self, tuple(digits))

    def __call__(self, x):
        if isinstance(x, RamifiedElement):
            return x
        c = self.base(x)
        return RamifiedElement(self, (c,) + (self._bzero,) * (self.e - 1))

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def pi_power(self, k):
        if k >= 0:
            return self.pi**k
        return self.inv_pi ** (-k)

    def trace(self, x):
        """Tr(sum c_i pi^i) = sum c_i Tr(pi^i), with Tr(pi^i) from Newton sums."""
        x = self(x)
        acc = self._bzero
        for c, s in zip(x.c, self._psums):
            if not c.is_exact_zero():
                acc = acc + c * s
        return acc

    def gram_matrix(self):
        e = self.e
        s = self.power_sums
        return [[s[i + j] for j in range(e)] for i in range(e)]

    def gram_determinant(self):
        """det(Tr(pi^{i+j})) as a base element; it must survive at precision K."""
        d = integer_determinant(self.gram_matrix())
        if d == 0 or vp_int(d, self.p) >= self.prec:
            raise PrecisionExhausted("trace-form determinant vanishes modulo p^K")
        return self.base(d)

    def random_element(self, rng):
        B = self.base
        if isinstance(B, PadicField):
            return self.element([B.random_integral(rng) for _ in range(self.e)])
        return self.element([B.random_element(rng) for _ in range(self.e)])


class RamifiedElement:
    __slots__ = ("parent", "c")

    def __init__(self, parent, c):
        self.parent = parent
        self.c = c

    def _co(self, other):
        if isinstance(other, RamifiedElement):
            return other
        try:
            return self.parent(other)
        except TypeError:
            return None

    def is_zero(self):
        return all(x.is_zero() for x in self.c)

    def valuation(self):
        best = inf
        for i, x in enumerate(self.c):
            if not x.is_zero():
                v = x.valuation() + Fraction(i, self.parent.e)
                if v < best:
                    best = v
        return best

    @property
    def absprec(self):
        e = self.parent.e
        return min(x.absprec + Fraction(i, e) for i, x in enumerate(self.c))

    def is_integral(self):
        v = self.valuation()
        if v == inf:
            if self.absprec < 0:
                raise PrecisionExhausted("zero known only to negative precision")
            return True
        return v >= 0

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return RamifiedElement(self.parent, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return RamifiedElement(self.parent, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return RamifiedElement(self.parent, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        R = self.parent
        if not isinstance(other, RamifiedElement):
            if isinstance(other, (int, Fraction)):
                other = R.base(other)
            if isinstance(other, (Padic, UnramifiedElement)):
                return RamifiedElement(R, tuple(a * other for a in self.c))
            return NotImplemented
        e = R.e
        zero = R._bzero
        r = [zero] * (2 * e - 1)
        for i, a in enumerate(self.c):
            if _exact_zero(a):
                continue
            for j, b in enumerate(other.c):
                if _exact_zero(b):
                    continue
                r[i + j] = r[i + j] + a * b
        for k in range(2 * e - 2, e - 1, -1):
            top = r[k]
            if _exact_zero(top):
                continue
            red = R._red[k]
            for i in range(e):
                if R._red_int[k][i]:
                    r[i] = r[i] + top * red[i]
        return RamifiedElement(R, tuple(r[:e]))

    __rmul__ = __mul__

    def inverse(self):
        R = self.parent
        e = R.e
        cols = []
        basis = R.one()
        for _ in range(e):
            cols.append((self * basis).c)
            basis = basis * R.pi
        rows = [[cols[j][i] for j in range(e)] for i in range(e)]
        B = R.base
        y = solve_linear(rows, [B.one()] + [B.zero()] * (e - 1))
        return R.element(y)

    def __truediv__(self, other):
        R = self.parent
        if isinstance(other, (int, Fraction, Padic, UnramifiedElement)):
            o = R.base(other) if isinstance(other, (int, Fraction)) else other
            return RamifiedElement(R, tuple(a / o for a in self.c))
        if not isinstance(other, RamifiedElement):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.parent.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    def frobenius(self):
        return RamifiedElement(self.parent, tuple(_frob(a) for a in self.c))

    def trace(self):
        return self.parent.trace(self)

    def digit_string(self):
        return "|".join(x.digit_string() for x in self.c)

    def __repr__(self):
        terms = []
        for i, x in enumerate(self.c):
            if not x.is_zero():
                terms.append(f"({x!r})*pi^{i}" if i else f"({x!r})")
        return " + ".join(terms) if terms else "0"


def _exact_zero(x):
    if isinstance(x, Padic):
        return x.is_exact_zero()
    return all(c.is_exact_zero() for c in x.c)


def _frob(x):
    return x.frobenius()


# ---------------------------------------------------------------------------
# Factories and the operator front-end
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def make_base_ring(config):
    if config.f == 1:
        return PadicField(config.p, config.K)
    return UnramifiedRing(config.p, config.K, config.f, config.modulus)


@lru_cache(maxsize=None)
def make_ramified_ring(config, eis):
    return RamifiedRing(make_base_ring(config), eis)


def frobenius(x):
    """The Frobenius lift; the identity on Z_p and on integers."""
    if isinstance(x, (int, Fraction)):
        return x
    return x.frobenius()


def _check_budget(x, result):
    if x.valuation() >= 0 and not x.is_zero() and result.absprec <= 0:
        raise PrecisionExhausted("no p-adic digits left after division by p")


def delta_p(x):
    """Fermat quotient (phi(x) - x^p)/p."""
    if isinstance(x, (int, Fraction)):
        raise TypeError("delta_p needs a ring element; embed integers with ring(x) first")
    p = x.parent.p
    result = (x.frobenius() - x**p) / p
    _check_budget(x, result)
    return result


def delta_pi(x, ring=None):
    """(phi(x) - x^p)/pi in R_pi; base elements are embedded into ``ring`` first."""
    if not isinstance(x, RamifiedElement):
        if ring is None:
            raise TypeError("delta_pi of a base element needs the ramified ring")
        x = ring(x)
    R = x.parent
    diff = x.frobenius() - x ** R.p
    if x.valuation() >= 0 and not diff.is_zero() and diff.valuation() < R.v_pi:
        raise DivisibilityFailure("phi(x) - x^p is not divisible by pi", witness=x)
    result = diff * R.inv_pi
    _check_budget(x, result)
    return result


def valuation(x):
    """v_p(x) with v_p(p) = 1; an element that is 0 at working precision gives inf."""
    if isinstance(x, (int, Fraction)):
        raise TypeError("valuation needs a ring element")
    return x.valuation()


def trace(x):
    if not isinstance(x, RamifiedElement):
        raise TypeError("trace is defined on elements of R_pi")
    return x.parent.trace(x)
