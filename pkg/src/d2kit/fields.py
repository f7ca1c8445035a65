"""Exact scalar arithmetic over Q and over prime fields F_p.

Scalars over Q are gmpy2.mpq (the same dtype sympy's QQ domain uses, so
matrices cross into sympy without conversion).  Scalars over F_p are plain
ints in [0, p).  A Field object owns conversion, formatting and the few
scalar ops whose spelling differs between the two kinds.
"""

from fractions import Fraction

from gmpy2 import mpq
from sympy import GF, QQ


class FieldError(ValueError):
    pass


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class Field:
    """A computable exact field: the rationals, or F_p for a prime p."""

    __slots__ = ("kind", "p", "_domain")

    def __init__(self, kind, p=None):
        if kind == "rational":
            if p is not None:
                raise FieldError("rational field takes no characteristic")
            self.p = None
            self._domain = QQ
        elif kind == "prime":
            if p is None or not _is_prime(p):
                raise FieldError("prime field needs a prime characteristic, got %r" % (p,))
            self.p = p
            self._domain = GF(p)
        else:
            raise FieldError("unknown field kind %r" % (kind,))
        self.kind = kind

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Field) and self.kind == other.kind and self.p == other.p

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return "Q" if self.kind == "rational" else "F_%d" % self.p

    @property
    def characteristic(self):
        return 0 if self.kind == "rational" else self.p

    # -- scalar construction ---------------------------------------------

    def zero(self):
        return mpq(0) if self.kind == "rational" else 0

    def one(self):
        return mpq(1) if self.kind == "rational" else 1

    def conv(self, x):
        """Convert an int / Fraction / mpq / 'a/b' string into a scalar."""
        if isinstance(x, float):
            raise FieldError("floating point is not allowed anywhere; got %r" % (x,))
        if self.kind == "rational":
            return mpq(x)
        if isinstance(x, str):
            if "/" in x:
                num, den = x.split("/")
                return (int(num) * self.inv(int(den) % self.p)) % self.p
            x = int(x)
        if isinstance(x, Fraction):
            return (x.numerator * self.inv(x.denominator % self.p)) % self.p
        return int(x) % self.p

    def conv_vec(self, xs):
        return tuple(self.conv(x) for x in xs)

    # -- the ops whose spelling differs -----------------------------------

    def add(self, a, b):
        return a + b if self.p is None else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p is None else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.p is None else (a * b) % self.p

    def neg(self, a):
        return -a if self.p is None else (-a) % self.p

    def inv(self, a):
        if self.p is None:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / mpq(a)
        return pow(int(a), -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) if self.p is None else (a * self.inv(b)) % self.p

    # -- formatting --------------------------------------------------------

    def to_str(self, a):
        """Serialize a scalar: 'num/den' over Q (den omitted when 1), int over F_p."""
        if self.kind == "rational":
            a = mpq(a)
            return str(a.numerator) if a.denominator == 1 else "%d/%d" % (a.numerator, a.denominator)
        return str(int(a) % self.p)

    # -- random scalars (searches take explicit seeds) ---------------------

    def rand(self, rng, height=5):
        if self.kind == "rational":
            return mpq(rng.randint(-height, height))
        return rng.randrange(self.p)

    def rand_nonzero(self, rng, height=5):
        while True:
            a = self.rand(rng, height)
            if a != self.zero():
                return a

    # -- sympy bridge -------------------------------------------------------

    def domain(self):
        return self._domain

    def to_domain(self, a):
        """Scalar -> sympy domain element (plain ints are accepted too)."""
        if self.kind == "rational":
            return a if isinstance(a, type(mpq())) else mpq(a)
        return self._domain(int(a))

    def from_domain(self, a):
        """sympy domain element -> scalar."""
        if self.kind == "rational":
            return mpq(a)
        return int(a.val) % self.p


QQ_FIELD = Field("rational")


def field_from_spec(spec):
    """{'kind': 'rational'} or {'kind': 'prime', 'p': p} -> Field."""
    kind = spec.get("kind")
    if kind == "rational":
        return Field("rational")
    if kind == "prime":
        return Field("prime", spec.get("p"))
    raise FieldError("unknown field kind %r" % (kind,))
