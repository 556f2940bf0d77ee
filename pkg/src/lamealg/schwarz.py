"""Hypergeometric operators, the Schwarz list, and polyhedral functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .exactalg import NumberField, Polynomial, RationalFunction, X, squarefree_decomposition
from .fuchsian import INFINITY, DifferentialOperator
from .roots import aberth_roots, backward_error, cluster_roots

__all__ = [
    "DegenerateTripleError",
    "GroupTag",
    "SchwarzEntry",
    "SchwarzTriple",
    "basic_entry",
    "basic_entries",
    "entry_for_triple",
    "full_schwarz_case",
    "full_schwarz_lookup",
    "hypergeometric_operator",
    "invert_polyhedral",
    "normalize_triple",
    "polyhedral_map",
    "SQRT_MINUS_3",
]


class DegenerateTripleError(ValueError):
    """A triple with an integral entry outside the cyclic family."""


@dataclass(frozen=True, order=True)
class SchwarzTriple:
    """Exponent differences at z = 0, 1, infinity (in that order)."""

    lam: Fraction
    mu: Fraction
    nu: Fraction

    def __init__(self, lam, mu, nu):
        object.__setattr__(self, "lam", Fraction(lam))
        object.__setattr__(self, "mu", Fraction(mu))
        object.__setattr__(self, "nu", Fraction(nu))

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.lam, self.mu, self.nu)

    def sorted(self) -> "SchwarzTriple":
        return SchwarzTriple(*sorted(self.as_tuple(), reverse=True))

    def __iter__(self):
        return iter(self.as_tuple())

    def __str__(self):
        return ",".join(_fmt(v) for v in self.as_tuple())

    @classmethod
    def parse(cls, text: str) -> "SchwarzTriple":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"a triple needs three entries, got {text!r}")
        return cls(*(Fraction(p) for p in parts))


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_GROUP_KINDS = ("cyclic", "dihedral", "tetrahedral", "octahedral", "icosahedral")


@dataclass(frozen=True)
class GroupTag:
    """A finite subgroup of the Moebius group, up to isomorphism."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in _GROUP_KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")

    @property
    def order(self) -> int:
        return {
            "cyclic": self.n,
            "dihedral": 2 * self.n,
            "tetrahedral": 12,
            "octahedral": 24,
            "icosahedral": 60,
        }[self.kind]

    @property
    def short(self) -> str:
        if self.kind == "cyclic":
            return f"C{self.n}"
        if self.kind == "dihedral":
            return f"D{self.n}"
        return {"tetrahedral": "A4", "octahedral": "S4", "icosahedral": "A5"}[self.kind]

    def __str__(self):
        return self.short

    @classmethod
    def from_short(cls, name: str) -> "GroupTag":
        named = {"A4": TETRAHEDRAL, "S4": OCTAHEDRAL, "A5": ICOSAHEDRAL}
        if name in named:
            return named[name]
        if name[:1] in "CD" and name[1:].isdigit():
            return cls("cyclic" if name[0] == "C" else "dihedral", int(name[1:]))
        raise ValueError(f"unknown group name {name!r}")


TETRAHEDRAL = GroupTag("tetrahedral")
OCTAHEDRAL = GroupTag("octahedral")
ICOSAHEDRAL = GroupTag("icosahedral")


def hypergeometric_operator(t: SchwarzTriple) -> DifferentialOperator:
    """Normal-form hypergeometric operator with exponent differences t at 0, 1, oo."""
    lam, mu, nu = t.as_tuple()
    z = RationalFunction.lift(X)
    zm1 = z - 1
    B = (
        (1 - lam * lam) / (z * z * 4)
        + (1 - mu * mu) / (zm1 * zm1 * 4)
        + (lam * lam + mu * mu - 1 - nu * nu) / (z * zm1 * 4)
    )
    return DifferentialOperator(0, B)


# ---------------------------------------------------------------------------
# Normalization and lookup
# ---------------------------------------------------------------------------


def _reduce_entry(x: Fraction) -> tuple[Fraction, int]:
    """Residue r in (0, 1/2] of +-x mod 1 and the parity of the integer shift used."""
    x = abs(x)
    fl = math.floor(x)
    f = x - fl
    if f <= Fraction(1, 2):
        return f, fl % 2
    return 1 - f, (fl + 1) % 2


def normalize_triple(t: SchwarzTriple) -> SchwarzTriple:
    """Canonical representative of t under lam -> a +- lam, ... with a+b+c even.

    The representative has every entry in (0, 1], the least possible sum, and
    is sorted in decreasing order.  When the parities of the reductions to
    (0, 1/2] do not add up to an even number, the cheapest repair replaces
    the largest residue r by 1 - r (free when r = 1/2).
    """
    vals = t.as_tuple()
    if any(v.denominator == 1 for v in vals):
        raise DegenerateTripleError(f"triple {t} has an integral entry")
    reduced = [_reduce_entry(v) for v in vals]
    rs = sorted((r for r, _ in reduced), reverse=True)
    if sum(p for _, p in reduced) % 2:
        rs[0] = 1 - rs[0]
    return SchwarzTriple(*sorted(rs, reverse=True))


def _h(*vals) -> tuple:
    return tuple(Fraction(v) for v in vals)


# the fifteen classical rows as canonical representatives
_FULL_LIST: dict[tuple, tuple[str, GroupTag]] = {
    _h("1/2", "1/3", "1/3"): ("II", TETRAHEDRAL),
    _h("2/3", "1/3", "1/3"): ("III", TETRAHEDRAL),
    _h("1/2", "1/3", "1/4"): ("IV", OCTAHEDRAL),
    _h("2/3", "1/4", "1/4"): ("V", OCTAHEDRAL),
    _h("1/2", "1/3", "1/5"): ("VI", ICOSAHEDRAL),
    _h("2/5", "1/3", "1/3"): ("VII", ICOSAHEDRAL),
    _h("2/3", "1/5", "1/5"): ("VIII", ICOSAHEDRAL),
    _h("1/2", "2/5", "1/5"): ("IX", ICOSAHEDRAL),
    _h("3/5", "1/3", "1/5"): ("X", ICOSAHEDRAL),
    _h("2/5", "2/5", "2/5"): ("XI", ICOSAHEDRAL),
    _h("2/3", "1/3", "1/5"): ("XII", ICOSAHEDRAL),
    _h("4/5", "1/5", "1/5"): ("XIII", ICOSAHEDRAL),
    _h("1/2", "2/5", "1/3"): ("XIV", ICOSAHEDRAL),
    _h("3/5", "2/5", "1/3"): ("XV", ICOSAHEDRAL),
}


def _cyclic_lookup(vals) -> GroupTag:
    ints = [v for v in vals if v.denominator == 1]
    if len(ints) != 1:
        raise DegenerateTripleError("two or more integral exponent differences")
    n = ints[0]
    a, b = [v for v in vals if v.denominator != 1]
    ra, pa = _reduce_entry(a)
    rb, pb = _reduce_entry(b)
    # reach (r, 1, r): the integral entry moves to 1 with shift parity 1 + n
    if ra == rb and (pa + pb + 1 + n) % 2 == 0:
        return GroupTag("cyclic", ra.denominator)
    raise DegenerateTripleError(f"integral-entry triple {tuple(map(str, vals))} is outside the cyclic family")


def full_schwarz_case(t: SchwarzTriple) -> Optional[tuple[str, GroupTag]]:
    """(case label, group) when t normalizes onto the full list, else None."""
    vals = t.as_tuple()
    if any(v.denominator == 1 for v in vals):
        return ("Cyclic", _cyclic_lookup(vals))
    nt = normalize_triple(t).as_tuple()
    if nt[0] == nt[1] == Fraction(1, 2):
        return ("I", GroupTag("dihedral", nt[2].denominator))
    return _FULL_LIST.get(nt)


def full_schwarz_lookup(t: SchwarzTriple) -> Optional[GroupTag]:
    """Finite projective monodromy group of the hypergeometric operator, or None."""
    found = full_schwarz_case(t)
    return None if found is None else found[1]


# ---------------------------------------------------------------------------
# Basic list and polyhedral functions
# ---------------------------------------------------------------------------

SQRT_MINUS_3 = NumberField(Polynomial([3, 0, 1]), name="sqrt(-3)")


@dataclass(frozen=True)
class SchwarzEntry:
    case_label: str
    triple: SchwarzTriple
    group: GroupTag
    polyhedral: RationalFunction

    @property
    def degree(self) -> int:
        return self.polyhedral.degree

    def to_json(self) -> dict:
        return {
            "case": self.case_label,
            "triple": [_fmt(v) for v in self.triple],
            "group": self.group.short,
            "degree": self.degree,
        }


def _w(k: int) -> Polynomial:
    return Polynomial.monomial(k)


def _case_ii() -> RationalFunction:
    s = SQRT_MINUS_3.gen
    w4m1 = _w(4) - 1
    num = (_w(2) * w4m1 * w4m1).scale(s * 12)
    den = Polynomial([1, 0, s * 2, 0, 1]) ** 3
    return RationalFunction(num, den)


def _case_iv() -> RationalFunction:
    a = Polynomial([1, 0, 0, 0, -33, 0, 0, 0, -33, 0, 0, 0, 1])
    den = (_w(4) * (_w(4) - 1) ** 4).scale(108)
    return RationalFunction(-(a * a), den)


def _case_vi() -> RationalFunction:
    c = [0] * 31
    c[30], c[0] = 1, 1
    c[25], c[5] = 522, -522
    c[20], c[10] = -10005, -10005
    a = Polynomial(c)
    den = (_w(5) * Polynomial([-1, 0, 0, 0, 0, 11, 0, 0, 0, 0, 1]) ** 5).scale(1728)
    return RationalFunction(a * a, den)


_BASIC = {
    "II": (SchwarzTriple("1/2", "1/3", "1/3"), TETRAHEDRAL, _case_ii),
    "IV": (SchwarzTriple("1/2", "1/3", "1/4"), OCTAHEDRAL, _case_iv),
    "VI": (SchwarzTriple("1/2", "1/3", "1/5"), ICOSAHEDRAL, _case_vi),
}
_BASIC_CACHE: dict = {}


def basic_entry(label: str, n: Optional[int] = None) -> SchwarzEntry:
    """A row of the basic list: 'Cyclic' or 'I' (with n), 'II', 'IV', 'VI'."""
    key = (label, n)
    if key in _BASIC_CACHE:
        return _BASIC_CACHE[key]
    if label == "Cyclic":
        if not n or n < 1:
            raise ValueError("the cyclic row needs n >= 1")
        entry = SchwarzEntry("Cyclic", SchwarzTriple(Fraction(1, n), 1, Fraction(1, n)), GroupTag("cyclic", n),
                             RationalFunction.lift(_w(n)))
    elif label == "I":
        if not n or n < 2:
            raise ValueError("the dihedral row needs n >= 2")
        entry = SchwarzEntry("I", SchwarzTriple("1/2", "1/2", Fraction(1, n)), GroupTag("dihedral", n),
                             RationalFunction((_w(n) + 1) ** 2, _w(n).scale(4)))
    elif label in _BASIC:
        triple, group, build = _BASIC[label]
        entry = SchwarzEntry(label, triple, group, build())
    else:
        raise ValueError(f"unknown basic-list case {label!r}")
    _BASIC_CACHE[key] = entry
    return entry


def basic_entries() -> list[SchwarzEntry]:
    """The three polyhedral rows II, IV, VI."""
    return [basic_entry(k) for k in ("II", "IV", "VI")]


def entry_for_group(group: GroupTag) -> SchwarzEntry:
    return {"tetrahedral": basic_entry("II"), "octahedral": basic_entry("IV"),
            "icosahedral": basic_entry("VI")}[group.kind]


def entry_for_triple(t: SchwarzTriple) -> Optional[SchwarzEntry]:
    """The basic row whose triple equals t as a multiset (no normalization)."""
    key = tuple(sorted(t.as_tuple(), reverse=True))
    for e in basic_entries():
        if tuple(sorted(e.triple.as_tuple(), reverse=True)) == key:
            return e
    if key[0] == key[1] == Fraction(1, 2) and key[2].numerator == 1 and key[2].denominator >= 2:
        return basic_entry("I", key[2].denominator)
    return None


def polyhedral_map(e: SchwarzEntry) -> RationalFunction:
    return e.polyhedral


def _is_exact_point(z0) -> bool:
    return z0 is INFINITY or isinstance(z0, (int, Fraction))


def invert_polyhedral(e: SchwarzEntry, z0, tol: float = 1e-12, cluster_radius: float = 1e-6) -> list[tuple]:
    """Solutions w of z(w) = z0 with multiplicities.

    ``z0`` may be an exact rational, :data:`INFINITY`, or a complex number.
    Exact values use the squarefree decomposition of num - z0*den, so
    multiplicities are exact; complex values cluster the numeric roots.
    The point w = oo is reported as :data:`INFINITY` when the degree drops.
    """
    num, den = e.polyhedral.num, e.polyhedral.den
    m = e.degree
    out: list[tuple] = []
    if _is_exact_point(z0):
        poly = den if z0 is INFINITY else num - den.scale(Fraction(z0))
        for part, mult in squarefree_decomposition(poly):
            roots = aberth_roots(part.numeric_coeffs(), tol=tol).roots
            out.extend((complex(r), mult) for r in roots)
        drop = m - poly.degree
    else:
        z0 = complex(z0)
        coeffs = np.polysub(num.numeric_coeffs(), z0 * den.numeric_coeffs())
        drop = 0
        while coeffs.size > 1 and np.abs(coeffs[0]) <= 1e-14 * np.abs(coeffs).max():
            coeffs = coeffs[1:]
            drop += 1
        res = aberth_roots(coeffs, tol=tol)
        if backward_error(coeffs, res.roots).max() >= tol:
            raise ArithmeticError("polyhedral inversion did not reach the residual target")
        out.extend(cluster_roots(res.roots, cluster_radius))
    if drop:
        out.append((INFINITY, drop))
    finite = [(w, k) for w, k in out if w is not INFINITY]
    finite.sort(key=lambda wk: (np.angle(wk[0]), abs(wk[0])))
    return finite + [(w, k) for w, k in out if w is INFINITY]
