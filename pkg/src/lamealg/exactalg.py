"""Exact arithmetic: univariate polynomials and rational functions over the
rationals or a small algebraic number field.

Rationals are :class:`fractions.Fraction`.  Polynomials store their
coefficients lowest degree first and are always trimmed, so structural
equality is mathematical equality.  Rational functions are kept in canonical
form (coprime, monic denominator), which makes ``f == g`` an exact identity
test.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "Polynomial",
    "RationalFunction",
    "NumberField",
    "NumberFieldElement",
    "Factorization",
    "X",
    "as_coefficient",
    "factor_small",
    "squarefree_decomposition",
    "rf_arith",
    "rf_derivative",
    "rf_compose",
    "parse_rational_function",
    "format_rational",
]


def as_coefficient(c):
    """Coerce ints (and Fractions) into the exact coefficient domain."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, NumberFieldElement):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact coefficient: {c!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Dense univariate polynomial with exact coefficients.

    >>> p = Polynomial([20, -20, 0, 3])
    >>> str(p)
    '3*x^3 - 20*x + 20'
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_coefficient(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> "Polynomial":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Polynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-as_coefficient(r), 1])
        return p

    # -- basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_rational(self) -> bool:
        return all(isinstance(c, Fraction) or c.is_rational() for c in self.coeffs)

    def field(self):
        """The number field of the coefficients, or None for rationals."""
        for c in self.coeffs:
            if isinstance(c, NumberFieldElement):
                return c.field
        return None

    # -- arithmetic -----------------------------------------------------
    @staticmethod
    def _lift(other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, RationalFunction):
            return None
        try:
            return Polynomial([other])
        except TypeError:
            return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return Polynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] = out[i + j] + ca * cb
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            return RationalFunction(self, other)
        if isinstance(other, RationalFunction):
            return RationalFunction.lift(self) / other
        c = as_coefficient(other)
        if c == 0:
            raise ZeroDivisionError("polynomial division by zero constant")
        return Polynomial([x / c for x in self.coeffs])

    def __rtruediv__(self, other):
        return RationalFunction(Polynomial([other]), self)

    def scale(self, c) -> "Polynomial":
        c = as_coefficient(c)
        return Polynomial([x * c for x in self.coeffs])

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) - 1 < db:
            return Polynomial(), self
        inv_lc = 1 / other.lc
        quot = [Fraction(0)] * (len(rem) - db)
        bc = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            q = c * inv_lc
            quot[k - db] = q
            for j in range(db + 1):
                rem[k - db + j] = rem[k - db + j] - q * bc[j]
        return Polynomial(quot), Polynomial(rem[:db])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return self.scale(1 / self.lc)

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, (a % b).monic()
        return a.monic()

    def xgcd(self, other: "Polynomial"):
        """Return (g, s, t) with s*self + t*other = g, g monic."""
        r0, r1 = self, other
        s0, s1 = Polynomial([1]), Polynomial()
        t0, t1 = Polynomial(), Polynomial([1])
        while not r1.is_zero():
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        inv = 1 / r0.lc
        return r0.scale(inv), s0.scale(inv), t0.scale(inv)

    def order_at(self, q: "Polynomial") -> int:
        """Multiplicity of the factor q in self."""
        if self.is_zero():
            raise ValueError("order of the zero polynomial is infinite")
        k, p = 0, self
        while True:
            quo, rem = p.divmod(q)
            if not rem.is_zero():
                return k
            p, k = quo, k + 1

    # -- evaluation -----------------------------------------------------
    def __call__(self, x):
        """Horner evaluation; floats, complexes and arrays use the numeric path."""
        if isinstance(x, (float, complex, np.ndarray, np.generic)):
            return np.polyval(self.numeric_coeffs(), x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "Polynomial") -> "Polynomial":
        acc = Polynomial()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def numeric_coeffs(self) -> np.ndarray:
        """Complex coefficients, highest degree first (numpy.polyval order)."""
        return np.array([complex(c) for c in reversed(self.coeffs)], dtype=complex) if self.coeffs else np.zeros(1, complex)

    def to_numpy(self) -> np.poly1d:
        return np.poly1d(self.numeric_coeffs())

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, RationalFunction):
            return other == self
        try:
            return self.coeffs == Polynomial([other]).coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    # -- text form -----------------------------------------------------
    def to_string(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if isinstance(c, NumberFieldElement) and not c.is_rational():
                body = f"({c})"
                sign = "+"
            else:
                c = Fraction(c) if not isinstance(c, NumberFieldElement) else c.to_fraction()
                sign = "-" if c < 0 else "+"
                body = format_rational(abs(c))
            if k == 0:
                term = body
            else:
                mono = var if k == 1 else f"{var}^{k}"
                term = mono if body == "1" else f"{body}*{mono}"
            terms.append((sign, term))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, term in terms[1:]:
            out += f" {sign} {term}"
        return out

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"Polynomial({self.to_string()!r})"


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Exact rational function ``num/den`` in canonical form.

    Canonical means ``gcd(num, den) == 1`` and ``den`` monic; zero is ``0/1``.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1, *, _canonical: bool = False):
        if isinstance(num, RationalFunction):
            if not (isinstance(den, int) and den == 1):
                raise TypeError("use division for RationalFunction / denominator")
            self.num, self.den, self._hash = num.num, num.den, None
            return
        n = num if isinstance(num, Polynomial) else Polynomial([num])
        d = den if isinstance(den, Polynomial) else Polynomial([den])
        if d.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _canonical:
            if n.is_zero():
                d = Polynomial([1])
            else:
                g = n.gcd(d)
                if g.degree > 0:
                    n, d = n.exact_div(g), d.exact_div(g)
                lc = d.lc
                if lc != 1:
                    n, d = n.scale(1 / lc), d.scale(1 / lc)
        self.num, self.den = n, d
        self._hash = None

    @classmethod
    def lift(cls, obj) -> "RationalFunction":
        if isinstance(obj, RationalFunction):
            return obj
        if isinstance(obj, Polynomial):
            return cls(obj, Polynomial([1]), _canonical=True)
        return cls(Polynomial([obj]), Polynomial([1]), _canonical=True)

    # -- properties -----------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @property
    def degree(self) -> int:
        """Degree as a map P^1 -> P^1: max(deg num, deg den)."""
        return max(self.num.degree, self.den.degree, 0)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant rational function")
        return self.num.coeff(0) / self.den.coeff(0)

    # -- arithmetic -----------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction.lift(other)
        try:
            return RationalFunction.lift(as_coefficient(other))
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        g = self.den.gcd(o.den)
        if g.degree == 0:
            return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)
        d1, d2 = self.den.exact_div(g), o.den.exact_div(g)
        return RationalFunction(self.num * d2 + o.num * d1, d1 * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _canonical=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RationalFunction()
        # cross-cancel before multiplying keeps intermediate degrees down
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num.exact_div(g1), o.den.exact_div(g1)) if g1.degree > 0 else (self.num, o.den)
        n2, d1 = (o.num.exact_div(g2), self.den.exact_div(g2)) if g2.degree > 0 else (o.num, self.den)
        num, den = n1 * n2, d1 * d2
        lc = den.lc
        if lc != 1:
            num, den = num.scale(1 / lc), den.scale(1 / lc)
        return RationalFunction(num, den, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        lc = self.num.lc
        return RationalFunction(self.den.scale(1 / lc), self.num.scale(1 / lc), _canonical=True)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer exponent required")
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num ** n, self.den ** n, _canonical=True)

    def derivative(self) -> "RationalFunction":
        n, d = self.num, self.den
        if d.degree == 0:
            return RationalFunction(n.derivative(), d, _canonical=True)
        # d/dx (n/d) = (n'd - n d')/d^2 ; cancel gcd(d, d') first
        dd = d.derivative()
        g = d.gcd(dd)
        d_red = d.exact_div(g)
        top = n.derivative() * d_red - n * dd.exact_div(g)
        return RationalFunction(top, d_red * d)

    def compose(self, inner) -> "RationalFunction":
        return rf_compose(self, inner)

    # -- evaluation -----------------------------------------------------
    def __call__(self, x):
        if isinstance(x, (RationalFunction, Polynomial)):
            return rf_compose(self, x)
        if isinstance(x, (float, complex, np.ndarray, np.generic)):
            return self.num(x) / self.den(x)
        dv = self.den(x)
        if dv == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(x) / dv

    def numeric(self):
        """Fast complex evaluator (numpy polyval on both parts)."""
        nc, dc = self.num.numeric_coeffs(), self.den.numeric_coeffs()

        def f(x):
            return np.polyval(nc, x) / np.polyval(dc, x)

        return f

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def to_string(self, var: str = "x") -> str:
        if self.den.degree == 0 and self.den.lc == 1:
            return self.num.to_string(var)
        return f"({self.num.to_string(var)})/({self.den.to_string(var)})"

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"RationalFunction({self.to_string()!r})"


def rf_arith(a, b, op: str) -> RationalFunction:
    """Exact field operation ``op`` in {'add', 'sub', 'mul', 'div'}."""
    a, b = RationalFunction.lift(a), RationalFunction.lift(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def rf_derivative(f) -> RationalFunction:
    return RationalFunction.lift(f).derivative()


def rf_compose(outer, inner) -> RationalFunction:
    """Exact composition ``outer(inner(x))``; inner must be nonconstant."""
    outer = RationalFunction.lift(outer)
    inner = RationalFunction.lift(inner)
    if inner.is_constant():
        raise ValueError("inner map of a composition must be nonconstant")
    p, q = inner.num, inner.den
    N, D = outer.num, outer.den
    d = max(N.degree, D.degree, 0)
    p_pows = [Polynomial([1])]
    q_pows = [Polynomial([1])]
    for _ in range(d):
        p_pows.append(p_pows[-1] * p)
        q_pows.append(q_pows[-1] * q)

    def homog(P: Polynomial) -> Polynomial:
        acc = Polynomial()
        for k, c in enumerate(P.coeffs):
            if c != 0:
                acc = acc + (p_pows[k] * q_pows[d - k]).scale(c)
        return acc

    return RationalFunction(homog(N), homog(D))


# ---------------------------------------------------------------------------
# Number fields
# ---------------------------------------------------------------------------


class NumberField:
    """``Q[t]/(m(t))`` for a monic irreducible modulus m over the rationals.

    ``embedding`` fixes the complex root used for numerical evaluation; by
    default the root with the largest imaginary part (ties: largest real
    part), so Q(sqrt(-3)) embeds t -> +i*sqrt(3).
    """

    def __init__(self, modulus: Polynomial, name: str = "t", embedding: complex | None = None):
        modulus = modulus if isinstance(modulus, Polynomial) else Polynomial(modulus)
        if modulus.degree < 1 or not modulus.is_rational():
            raise ValueError("modulus must be a nonconstant rational polynomial")
        modulus = modulus.monic()
        self.irreducibility_verified = False
        if modulus.degree <= 3:
            fac = factor_small(modulus)
            if len(fac.factors) != 1 or fac.factors[0][1] != 1:
                raise ValueError(f"modulus {modulus} is reducible over Q")
            self.irreducibility_verified = True
        self.modulus = modulus
        self.name = name
        if embedding is None:
            roots = np.roots(modulus.numeric_coeffs())
            roots = sorted(roots, key=lambda r: (round(r.imag, 12), round(r.real, 12)))
            embedding = complex(roots[-1])
        self.embedding = complex(embedding)

    @property
    def degree(self) -> int:
        return self.modulus.degree

    def __call__(self, coeffs) -> "NumberFieldElement":
        if isinstance(coeffs, NumberFieldElement):
            return coeffs
        if isinstance(coeffs, Polynomial):
            return NumberFieldElement(self, coeffs)
        if isinstance(coeffs, (list, tuple)):
            return NumberFieldElement(self, Polynomial(coeffs))
        return NumberFieldElement(self, Polynomial([coeffs]))

    @property
    def gen(self) -> "NumberFieldElement":
        return NumberFieldElement(self, X)

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.modulus == other.modulus

    def __hash__(self):
        return hash(("NumberField", self.modulus))

    def __repr__(self):
        return f"NumberField({self.modulus.to_string(self.name)} = 0)"


class NumberFieldElement:
    """Element of a :class:`NumberField`, reduced modulo the modulus."""

    __slots__ = ("field", "rep")

    def __init__(self, field: NumberField, rep: Polynomial):
        self.field = field
        self.rep = rep % field.modulus if rep.degree >= field.degree else rep

    def _other(self, other):
        if isinstance(other, NumberFieldElement):
            if other.field != self.field:
                raise ValueError("elements of different number fields")
            return other.rep
        if isinstance(other, (int, Fraction)):
            return Polynomial([other])
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return NumberFieldElement(self.field, self.rep + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return NumberFieldElement(self.field, self.rep - o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return NumberFieldElement(self.field, o - self.rep)

    def __neg__(self):
        return NumberFieldElement(self.field, -self.rep)

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return NumberFieldElement(self.field, self.rep * o)

    __rmul__ = __mul__

    def inverse(self) -> "NumberFieldElement":
        if self.rep.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        g, s, _ = self.rep.xgcd(self.field.modulus)
        if g.degree > 0:
            raise ZeroDivisionError(f"{self} is a zero divisor modulo {self.field.modulus}")
        return NumberFieldElement(self.field, s)

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self * NumberFieldElement(self.field, o).inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return NumberFieldElement(self.field, o) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = NumberFieldElement(self.field, Polynomial([1]))
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def is_rational(self) -> bool:
        return self.rep.degree <= 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.rep.coeff(0)

    def trace(self) -> Fraction:
        """Trace from the field down to Q (sum over conjugates)."""
        n = self.field.degree
        total = Fraction(0)
        for k in range(n):
            col = NumberFieldElement(self.field, self.rep * Polynomial.monomial(k)).rep
            total += col.coeff(k)
        return total

    def __complex__(self):
        return complex(self.rep(self.field.embedding))

    def __eq__(self, other):
        if isinstance(other, NumberFieldElement):
            return self.field == other.field and self.rep == other.rep
        if isinstance(other, (int, Fraction)):
            return self.rep == Polynomial([other])
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.rep.coeff(0))
        return hash((self.field, self.rep))

    def __str__(self):
        return self.rep.to_string(self.field.name)

    def __repr__(self):
        return f"NumberFieldElement({self}; {self.field.modulus.to_string(self.field.name)} = 0)"


# ---------------------------------------------------------------------------
# Factorization (small degree)
# ---------------------------------------------------------------------------


class Factorization(NamedTuple):
    unit: object
    factors: list
    unverified: tuple = ()

    def expand(self) -> Polynomial:
        p = Polynomial([self.unit])
        for f, m in self.factors:
            p = p * f ** m
        return p


def squarefree_decomposition(p: Polynomial) -> list:
    """Yun's algorithm: list of (squarefree monic factor, multiplicity)."""
    if p.degree < 1:
        return []
    out = []
    f = p.monic()
    fp = f.derivative()
    a = f.gcd(fp)
    b = f.exact_div(a)
    c = fp.exact_div(a)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = b.gcd(d)
        if a.degree > 0:
            out.append((a, i))
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        i += 1
    return out


def _divisors(n: int, limit: int = 10**6):
    n = abs(n)
    small, large = [], []
    k = 1
    while k * k <= n:
        if k > limit:
            return None
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def _integer_primitive(p: Polynomial) -> list[int]:
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints]


def _rational_roots(p: Polynomial) -> list[Fraction]:
    """All rational roots of a squarefree rational polynomial."""
    if p.degree < 1:
        return []
    ints = _integer_primitive(p)
    roots = []
    if ints[0] == 0:
        roots.append(Fraction(0))
        k = next(i for i, c in enumerate(ints) if c != 0)
        ints = ints[k:]
    a0, an = ints[0], ints[-1]
    if len(ints) == 1:
        return roots
    num_div = _divisors(a0)
    den_div = _divisors(an)
    cands: set[Fraction] = set()
    if num_div is not None and den_div is not None and len(num_div) * len(den_div) <= 200_000:
        for u in num_div:
            for v in den_div:
                cands.add(Fraction(u, v))
                cands.add(Fraction(-u, v))
    else:
        # large coefficients: numerical candidates, exactly verified below
        for r in np.roots([float(c) for c in reversed(ints)]):
            if abs(r.imag) <= 1e-6 * max(1.0, abs(r.real)):
                cands.add(Fraction(r.real).limit_denominator(abs(an)))
    q = Polynomial(ints)
    for c in sorted(cands):
        if q(c) == 0:
            roots.append(c)
    return roots


def factor_small(p: Polynomial) -> Factorization:
    """Factor a rational polynomial into monic irreducibles over Q.

    Complete whenever every squarefree-part factor left after rational-root
    extraction has degree <= 3.  Larger leftovers are returned as single
    factors and listed in ``unverified``.
    """
    if not p.is_rational():
        raise ValueError("factor_small works over the rationals only")
    p = Polynomial([c if isinstance(c, Fraction) else c.to_fraction() for c in p.coeffs])
    if p.degree < 1:
        raise ValueError("factor_small needs a nonconstant polynomial")
    factors = []
    unverified = []
    for part, mult in squarefree_decomposition(p):
        rest = part
        for r in _rational_roots(part):
            lin = Polynomial([-r, 1])
            factors.append((lin, mult))
            rest = rest.exact_div(lin)
        if rest.degree >= 1:
            factors.append((rest.monic(), mult))
            if rest.degree > 3:
                unverified.append(rest.monic())
    factors.sort(key=lambda fm: (fm[0].degree, fm[0].coeffs))
    return Factorization(p.lc, factors, tuple(unverified))


X = Polynomial([0, 1])


# ---------------------------------------------------------------------------
# Text parsing
# ---------------------------------------------------------------------------

_VARIABLES = {"x", "z", "s", "w", "t"}


def parse_rational_function(text: str) -> RationalFunction:
    """Parse an expression such as ``"(3*x^3-20*x+20)*(2*x-5)^2/(12*(x-1)^5)"``.

    Integers, ``p/q`` rationals, one variable (any of x, z, s, w, t), the
    operators ``+ - * / ^`` (or ``**``) with integer exponents, and
    parentheses are accepted.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}: {exc.msg}") from None
    seen: set[str] = set()

    def walk(node) -> RationalFunction:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return RationalFunction.lift(node.value)
        if isinstance(node, ast.Name):
            if node.id not in _VARIABLES:
                raise ValueError(f"unknown symbol {node.id!r}")
            seen.add(node.id)
            if len(seen) > 1:
                raise ValueError("only univariate expressions are supported")
            return RationalFunction.lift(X)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = walk(node.right)
                if not exp.is_constant() or Fraction(exp.constant_value()).denominator != 1:
                    raise ValueError("exponents must be integers")
                return walk(node.left) ** int(exp.constant_value())
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
        raise ValueError(f"unsupported syntax in {text!r}")

    return walk(tree)


def parse_rational(text: str) -> Fraction:
    """Parse an exact rational like ``"-80/3"``; floats are rejected."""
    text = text.strip()
    if any(ch in text for ch in ".eE"):
        raise ValueError(f"exact rational expected, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None
