"""Capped relative precision p-adic numbers.

An element of Q_p is stored as ``p**val * unit`` where ``unit`` is a p-adic
unit known modulo ``p**prec``.  Zero carries an absolute precision instead:
``0 + O(p**val)``.  A zero built from the integer 0 is exact and absorbs
precision in products.

Precision is tracked automatically, so dividing by p costs one digit of
absolute precision and a sum that cancels loses the cancelled digits.
"""

from fractions import Fraction
from math import inf

from .errors import PrecisionExhausted


def vp_int(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        return inf
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(x, p):
    x = Fraction(x)
    if x == 0:
        return inf
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


class PadicField:
    """Q_p at relative precision ``prec``; elements with val >= 0 form Z_p."""

    def __init__(self, p, prec):
        if prec < 1:
            raise ValueError("precision must be at least 1")
        self.p = p
        self.prec = prec
        self._pow = [p**k for k in range(prec + 1)]

    def __repr__(self):
        return f"PadicField(p={self.p}, prec={self.prec})"

    def __eq__(self, other):
        return isinstance(other, PadicField) and (self.p, self.prec) == (other.p, other.prec)

    def __hash__(self):
        return hash((PadicField, self.p, self.prec))

    @property
    def degree(self):
        return 1

    def ppow(self, k):
        if k <= self.prec:
            return self._pow[k]
        return self.p**k

    def __call__(self, x):
        if isinstance(x, Padic):
            if x.parent is self:
                return x
            if x.parent.p != self.p:
                raise ValueError("prime mismatch")
            return self._make_raw(x.val, x.unit, x.prec)
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self!r}")

    def _make_raw(self, val, unit, prec):
        if prec > self.prec:
            prec = self.prec
            unit %= self._pow[prec]
        return Padic(self, val, unit, prec)

    def from_int(self, n):
        if n == 0:
            return Padic(self, inf, 0, 0)
        p = self.p
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return Padic(self, v, n % self._pow[self.prec], self.prec)

    def from_fraction(self, x):
        if x.denominator == 1:
            return self.from_int(x.numerator)
        if x == 0:
            return Padic(self, inf, 0, 0)
        p = self.p
        a, b = x.numerator, x.denominator
        v = 0
        while a % p == 0:
            a //= p
            v += 1
        while b % p == 0:
            b //= p
            v -= 1
        mod = self._pow[self.prec]
        return Padic(self, v, (a * pow(b, -1, mod)) % mod, self.prec)

    def zero(self, absprec=None):
        """Exact zero, or ``O(p**absprec)`` when an absolute precision is given."""
        return Padic(self, inf if absprec is None else absprec, 0, 0)

    def one(self):
        return self.from_int(1)

    def coerce(self, x):
        return self(x)

    def uniformizer_power(self, k):
        return Padic(self, k, 1, self.prec)

    def frobenius_image_of_generator(self):
        return None

    def random_element(self, rng, min_val=0, max_val=None):
        """Random element with valuation in ``[min_val, max_val]``."""
        max_val = min_val + 2 if max_val is None else max_val
        v = rng.randint(min_val, max_val)
        mod = self._pow[self.prec]
        u = rng.randrange(1, mod)
        while u % self.p == 0:
            u = rng.randrange(1, mod)
        return Padic(self, v, u, self.prec)

    def random_integral(self, rng):
        """Uniform element of Z_p modulo p**prec (may be a non-unit)."""
        return self.from_int(rng.randrange(0, self._pow[self.prec]))


class Padic:
    __slots__ = ("parent", "val", "unit", "prec")

    def __init__(self, parent, val, unit, prec):
        self.parent = parent
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- predicates -------------------------------------------------------
    def is_zero(self):
        return self.prec == 0

    def is_exact_zero(self):
        return self.prec == 0 and self.val == inf

    def valuation(self):
        return inf if self.prec == 0 else self.val

    @property
    def absprec(self):
        return self.val + self.prec

    def is_integral(self):
        return self.prec == 0 or self.val >= 0

    def is_unit(self):
        return self.prec > 0 and self.val == 0

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Padic):
            return other
        if isinstance(other, (int, Fraction)):
            return self.parent(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.prec == 0 and self.val == inf:
            return other
        if other.prec == 0 and other.val == inf:
            return self
        F = self.parent
        n = min(self.val + self.prec, other.val + other.prec)
        v = min(self.val, other.val)
        if v >= n:
            return Padic(F, n, 0, 0)
        p = F.p
        s = 0
        if self.prec:
            s += self.unit * F.ppow(self.val - v)
        if other.prec:
            s += other.unit * F.ppow(other.val - v)
        s %= F.ppow(n - v)
        if s == 0:
            return Padic(F, n, 0, 0)
        k = 0
        while s % p == 0:
            s //= p
            k += 1
        val = v + k
        prec = n - val
        if prec > F.prec:
            prec = F.prec
            s %= F._pow[prec]
        return Padic(F, val, s, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.prec == 0:
            return self
        return Padic(self.parent, self.val, (-self.unit) % self.parent.ppow(self.prec), self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        F = self.parent
        if self.prec == 0 or other.prec == 0:
            if self.val == inf or other.val == inf:
                return Padic(F, inf, 0, 0)
            return Padic(F, self.val + other.val, 0, 0)
        prec = self.prec if self.prec < other.prec else other.prec
        return Padic(F, self.val + other.val, (self.unit * other.unit) % F.ppow(prec), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        F = self.parent
        if other.prec == 0:
            raise PrecisionExhausted("division by a p-adic zero")
        if self.prec == 0:
            return Padic(F, self.val - other.val, 0, 0)
        prec = self.prec if self.prec < other.prec else other.prec
        mod = F.ppow(prec)
        return Padic(F, self.val - other.val, (self.unit * pow(other.unit, -1, mod)) % mod, prec)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        F = self.parent
        if n == 0:
            return F.one()
        if n < 0:
            return F.one() / self**(-n)
        if self.prec == 0:
            return Padic(F, self.val * n if self.val != inf else inf, 0, 0)
        return Padic(F, self.val * n, pow(self.unit, n, F.ppow(self.prec)), self.prec)

    def shift(self, k):
        """Multiply by p**k."""
        if self.prec == 0 and self.val == inf:
            return self
        return Padic(self.parent, self.val + k, self.unit, self.prec)

    def frobenius(self):
        return self

    def trace(self):
        return self

    def add_bigoh(self, absprec):
        """Forget digits at and beyond ``p**absprec``."""
        if absprec >= self.val + self.prec:
            return self
        F = self.parent
        if self.prec == 0 or absprec <= self.val:
            return Padic(F, absprec, 0, 0)
        prec = absprec - self.val
        return Padic(F, self.val, self.unit % F.ppow(prec), prec)

    # -- comparison / conversion -----------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def lift(self):
        """Rational representative: an int when integral, else a Fraction."""
        if self.prec == 0:
            return 0
        if self.val >= 0:
            return self.unit * self.parent.p**self.val
        return Fraction(self.unit, self.parent.p ** (-self.val))

    def residue(self, k):
        """Integer in [0, p**k) congruent to an integral element."""
        if self.prec == 0:
            if self.val < k:
                raise PrecisionExhausted(f"zero known only modulo p^{self.val}")
            return 0
        if self.val < 0:
            raise ValueError("residue of a non-integral element")
        if self.val + self.prec < k:
            raise PrecisionExhausted(f"element known only modulo p^{self.absprec}")
        return (self.unit * self.parent.p**self.val) % self.parent.p**k

    def digit_string(self):
        """Canonical text form: ``val:d0.d1...`` or ``O<absprec>`` for zero."""
        if self.prec == 0:
            return "0" if self.val == inf else f"O{self.val}"
        p = self.parent.p
        u = self.unit
        ds = []
        for _ in range(self.prec):
            u, d = divmod(u, p)
            ds.append(str(d))
        return f"{self.val}:" + ".".join(ds)

    def __repr__(self):
        if self.prec == 0:
            return "0" if self.val == inf else f"O({self.parent.p}^{self.val})"
        mod = self.parent.ppow(self.prec)
        u = self.unit if 2 * self.unit <= mod else self.unit - mod
        x = u * self.parent.p**self.val if self.val >= 0 else Fraction(u, self.parent.p ** (-self.val))
        return f"{x} + O({self.parent.p}^{self.absprec})"


def parse_padic(F, text):
    """Inverse of :meth:`Padic.digit_string`."""
    text = text.strip()
    if text == "0":
        return F.zero()
    if text.startswith("O"):
        return F.zero(int(text[1:]))
    val, _, digits = text.partition(":")
    ds = [int(d) for d in digits.split(".")]
    unit = 0
    for d in reversed(ds):
        unit = unit * F.p + d
    return F._make_raw(int(val), unit, len(ds))
