"""Monic second-order Fuchsian operators ``D^2 + A D + B`` on the projective line.

Finite points are named by monic irreducible polynomials over Q (a rational
point ``r`` is ``x - r``), so conjugate algebraic singularities are handled
together.  Local data at a root of a higher-degree factor is computed in the
number field ``Q[t]/(q)``.  The point at infinity is :data:`INFINITY`, and its
exponents are read off in the chart ``x = 1/s``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exactalg import (
    NumberField,
    NumberFieldElement,
    Polynomial,
    RationalFunction,
    X,
    factor_small,
    parse_rational_function,
)

__all__ = [
    "INFINITY",
    "DifferentialOperator",
    "NonFuchsianError",
    "SingularPoint",
    "WronskianData",
    "exponent_difference",
    "fuchs_relation",
    "local_exponents",
    "normal_form",
    "point_location",
    "projectively_equivalent",
    "singular_points",
    "wronskian",
]


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "oo"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

Location = Union[Polynomial, _Infinity]


class NonFuchsianError(ValueError):
    """A pole of A or B is too high for a regular singular point."""

    def __init__(self, message: str, factor):
        super().__init__(message)
        self.factor = factor


def _rf(obj) -> RationalFunction:
    return RationalFunction.lift(obj)


def _exact_scalar(v):
    """Collapse rational number-field elements to Fractions."""
    if isinstance(v, NumberFieldElement) and v.is_rational():
        return v.to_fraction()
    return v


class DifferentialOperator:
    """The operator ``D^2 + A*D + B`` with exact rational-function coefficients."""

    __slots__ = ("A", "B")

    def __init__(self, A=0, B=0):
        self.A = _rf(A)
        self.B = _rf(B)

    def apply(self, u) -> RationalFunction:
        u = _rf(u)
        du = u.derivative()
        return du.derivative() + self.A * du + self.B * u

    def __eq__(self, other):
        return isinstance(other, DifferentialOperator) and self.A == other.A and self.B == other.B

    def __hash__(self):
        return hash((self.A, self.B))

    def to_json(self) -> dict:
        return {"A": str(self.A), "B": str(self.B)}

    @classmethod
    def from_json(cls, data) -> "DifferentialOperator":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(parse_rational_function(data["A"]), parse_rational_function(data["B"]))

    def __repr__(self):
        return f"DifferentialOperator(A={self.A}, B={self.B})"


# ---------------------------------------------------------------------------
# Local data
# ---------------------------------------------------------------------------


def point_location(p) -> Location:
    """Normalize a point: INFINITY, a rational number, or an irreducible polynomial."""
    if p is INFINITY:
        return p
    if isinstance(p, SingularPoint):
        return p.location
    if isinstance(p, Polynomial):
        if p.degree < 1:
            raise ValueError("a point is named by a nonconstant polynomial")
        return p.monic()
    return Polynomial([-Fraction(p), 1])


def _field_for(q: Polynomial) -> Optional[NumberField]:
    return None if q.degree == 1 else NumberField(q)


def _value_at_root(poly: Polynomial, q: Polynomial, field):
    if field is None:
        return poly(-q.coeff(0))
    return poly(field.gen)


def _laurent_leading(f: RationalFunction, q: Polynomial, order: int, field):
    """lim (x-r)^order f(x) at a root r of q, given ord_q(den f) <= order."""
    k = f.den.order_at(q)
    if k > order:
        raise NonFuchsianError(f"pole of order {k} > {order} at roots of {q}", q)
    if k < order:
        return Fraction(0)
    rest = f.den
    for _ in range(k):
        rest = rest.exact_div(q)
    dq = _value_at_root(q.derivative(), q, field)
    return _exact_scalar(_value_at_root(f.num, q, field) / (dq ** order * _value_at_root(rest, q, field)))


def _at_infinity(f: RationalFunction, order: int):
    """lim x^order f(x) as x -> infinity, given deg excess <= -order."""
    excess = f.num.degree - f.den.degree
    if f.is_zero() or excess < -order:
        return Fraction(0)
    if excess > -order:
        raise NonFuchsianError(f"coefficient grows too fast at infinity (degree excess {excess})", INFINITY)
    return f.num.lc / f.den.lc


def _squarefree_split(d: Fraction):
    """Write d = k^2 * m with m a squarefree integer."""
    num, den = d.numerator * d.denominator, d.denominator
    # d = num / den^2 ; pull squares out of num
    sign = -1 if num < 0 else 1
    n = abs(num)
    k, m = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            m *= p
        p += 1
    m *= n
    return Fraction(k, den), sign * m


def _rational_sqrt(d: Fraction) -> Optional[Fraction]:
    if d < 0:
        return None
    rn, rd = math.isqrt(d.numerator), math.isqrt(d.denominator)
    if rn * rn == d.numerator and rd * rd == d.denominator:
        return Fraction(rn, rd)
    return None


def _exponents_from(a0, b0):
    """Exponents and their difference from the indicial data a0, b0."""
    disc = _exact_scalar((a0 - 1) * (a0 - 1) - 4 * b0)
    if isinstance(a0, NumberFieldElement) or isinstance(disc, NumberFieldElement):
        return None, None, disc
    s = _rational_sqrt(disc)
    if s is not None:
        lo, hi = (1 - a0 - s) / 2, (1 - a0 + s) / 2
        return (lo, hi), s, disc
    k, m = _squarefree_split(disc)
    field = NumberField(Polynomial([-m, 0, 1]), name=f"sqrt({m})")
    delta = field.gen * k
    half = Fraction(1, 2)
    e1 = (delta * (-half)) + (1 - a0) * half
    e2 = (delta * half) + (1 - a0) * half
    return (e1, e2), delta, disc


@dataclass(frozen=True)
class SingularPoint:
    """Local data of an operator at a point (or at all roots of an irreducible factor).

    ``exponents`` is the pair of roots of rho^2 + (a0-1) rho + b0 with the
    larger one last.  ``exponent_difference`` is nonnegative when rational and
    otherwise lies in a quadratic field whose generator embeds with positive
    real part (or positive imaginary part when purely imaginary); it is
    ``None`` when the indicial data itself is irrational.
    """

    location: Location
    a0: object
    b0: object
    exponents: Optional[tuple]
    exponent_difference: object
    difference_squared: object

    @property
    def is_infinity(self) -> bool:
        return self.location is INFINITY

    @property
    def degree(self) -> int:
        """Number of conjugate points represented."""
        return 1 if self.is_infinity else self.location.degree

    @property
    def root(self):
        """The rational coordinate, when the point is rational and finite."""
        if self.is_infinity or self.location.degree != 1:
            return None
        return -self.location.coeff(0)

    @property
    def equal_exponents(self) -> bool:
        """Equal exponents: a logarithmic solution is possible (not decided)."""
        return self.difference_squared == 0

    @property
    def exponent_sum(self):
        return _exact_scalar(1 - self.a0)

    def is_ordinary_data(self) -> bool:
        return self.exponents is not None and tuple(self.exponents) == (0, 1)

    def label(self) -> str:
        if self.is_infinity:
            return "oo"
        if self.location.degree == 1:
            r = self.root
            return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"
        return f"roots({self.location})"

    def numeric_locations(self) -> list[complex]:
        from .roots import aberth_roots

        if self.is_infinity:
            return [complex("inf")]
        if self.location.degree == 1:
            return [complex(self.root)]
        return [complex(z) for z in aberth_roots(self.location.numeric_coeffs()).roots]

    def to_json(self) -> dict:
        def fmt(v):
            return None if v is None else str(v)

        return {
            "location": self.label(),
            "degree": self.degree,
            "exponents": None if self.exponents is None else [fmt(e) for e in self.exponents],
            "exponentDifference": fmt(self.exponent_difference),
            "equalExponents": self.equal_exponents,
        }


def local_exponents(L: DifferentialOperator, point) -> SingularPoint:
    """Indicial data of L at ``point`` (ordinary points give exponents 0, 1)."""
    loc = point_location(point)
    if loc is INFINITY:
        a0 = 2 - _at_infinity(L.A, 1)
        b0 = _at_infinity(L.B, 2)
    else:
        field = _field_for(loc)
        a0 = _laurent_leading(L.A, loc, 1, field)
        b0 = _laurent_leading(L.B, loc, 2, field)
    exps, diff, disc = _exponents_from(a0, b0)
    return SingularPoint(loc, a0, b0, exps, diff, disc)


def _is_singular_at_infinity(L: DifferentialOperator) -> bool:
    # ordinary at infinity iff A = 2/x + O(x^-2) and B = O(x^-4)
    rest = L.A - RationalFunction(Polynomial([2]), X)
    a_ok = rest.is_zero() or rest.num.degree - rest.den.degree <= -2
    b_ok = L.B.is_zero() or L.B.num.degree - L.B.den.degree <= -4
    return not (a_ok and b_ok)


def _pole_factors(L: DifferentialOperator) -> list[Polynomial]:
    den = L.A.den * L.B.den
    if den.degree < 1:
        return []
    fac = factor_small(den)
    seen = []
    for q, _ in fac.factors:
        if q not in seen:
            seen.append(q)
    return seen


def singular_points(L: DifferentialOperator) -> list[SingularPoint]:
    """Finite singular factors (in factorization order) then infinity if singular."""
    out = [local_exponents(L, q) for q in _pole_factors(L)]
    if _is_singular_at_infinity(L):
        out.append(local_exponents(L, INFINITY))
    return out


def exponent_difference(L: DifferentialOperator, point):
    """Exponent difference at any point; ordinary points give 1."""
    loc = point_location(point)
    if loc is INFINITY:
        if not _is_singular_at_infinity(L):
            return Fraction(1)
    elif L.A.den.order_at(loc) == 0 and L.B.den.order_at(loc) == 0:
        return Fraction(1)
    return local_exponents(L, loc).exponent_difference


def _trace(v) -> Fraction:
    return v.trace() if isinstance(v, NumberFieldElement) else Fraction(v)


def fuchs_relation(L: DifferentialOperator):
    """Sum of all exponents minus (number of singular points - 2); zero on P^1."""
    total = Fraction(0)
    count = 0
    for sp in singular_points(L):
        if sp.is_infinity:
            total += Fraction(sp.exponent_sum)
        else:
            # exponent sum 1 - a0 summed over the conjugate roots
            total += sp.degree - _trace(sp.a0) if isinstance(sp.a0, NumberFieldElement) else sp.degree * (1 - sp.a0)
        count += sp.degree
    if not any(sp.is_infinity for sp in singular_points(L)):
        # ordinary infinity: exponents 0 and 1 in the local chart
        total += 1
        count += 1
    return total - (count - 2)


def normal_form(L: DifferentialOperator) -> DifferentialOperator:
    """The projectively equivalent operator with A = 0: B - A'/2 - A^2/4."""
    A = L.A
    if A.is_zero():
        return DifferentialOperator(0, L.B)
    B = L.B - A.derivative() * Fraction(1, 2) - A * A * Fraction(1, 4)
    return DifferentialOperator(0, B)


def projectively_equivalent(L1: DifferentialOperator, L2: DifferentialOperator) -> bool:
    return normal_form(L1).B == normal_form(L2).B


# ---------------------------------------------------------------------------
# Wronskian
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WronskianData:
    """The multivalued function prod q_i(x)^{e_i} (times a constant ``unit``).

    Evaluation uses the principal branch of each factor's power separately.
    """

    factors: tuple
    unit: Fraction = Fraction(1)

    @property
    def algebraic(self) -> bool:
        return all(isinstance(e, Fraction) for _, e in self.factors)

    def power(self, k) -> "WronskianData":
        k = Fraction(k)
        return WronskianData(tuple((q, _exact_scalar(e * k)) for q, e in self.factors), self.unit)

    def log_derivative(self) -> RationalFunction:
        """w'/w as an exact rational function (rational exponents only)."""
        out = RationalFunction()
        for q, e in self.factors:
            if not isinstance(e, Fraction):
                raise ValueError("log-derivative needs rational exponents")
            out = out + RationalFunction(q.derivative(), q) * e
        return out

    def evaluate(self, x) -> complex:
        val = complex(1.0)
        for q, e in self.factors:
            val *= complex(q(complex(x))) ** complex(e)
        return val * float(self.unit) if self.unit != 1 else val

    def derivatives(self, x) -> tuple[complex, complex, complex]:
        """Values of w, w', w'' at x via exact log-derivatives."""
        w = self.evaluate(x)
        g = self.log_derivative()
        gd = g.derivative()
        gv, gdv = complex(g(complex(x))), complex(gd(complex(x)))
        return w, w * gv, w * (gdv + gv * gv)

    def to_json(self) -> list:
        return [[str(q), str(e)] for q, e in self.factors]

    def __str__(self):
        if not self.factors:
            return "1"
        return "*".join(f"({q})^({e})" for q, e in self.factors)


def wronskian(L: DifferentialOperator) -> WronskianData:
    """Solve Dw + A w = 0 in factored form; A must have simple poles only."""
    A = L.A
    if A.is_zero():
        return WronskianData(())
    if A.num.degree >= A.den.degree:
        raise NonFuchsianError("A has a polynomial part; the Wronskian is not of factored form", INFINITY)
    fac = factor_small(A.den)
    factors = []
    for q, mult in fac.factors:
        if mult > 1:
            raise NonFuchsianError(f"A has a pole of order {mult} at roots of {q}", q)
        cofactor = A.den.exact_div(q)
        # partial-fraction numerator N_q with A = N_q/q + (rest regular at q)
        _, s, _ = cofactor.xgcd(q)
        nq = (A.num * s) % q
        field = _field_for(q)
        residue = _exact_scalar(_value_at_root(nq, q, field) / _value_at_root(q.derivative(), q, field))
        if not isinstance(residue, Fraction) and nq != q.derivative().scale(nq.lc / q.lc / q.degree):
            raise ValueError(f"residues of A differ across the roots of {q}")
        factors.append((q, -residue))
    return WronskianData(tuple(factors))
