"""Pullbacks of hypergeometric operators along rational maps.

A certificate checks, as an exact identity of rational functions, that the
normal form of an operator ``L`` on the x-line equals the normal form of the
hypergeometric operator pulled back along ``z = xi(x)``.  Around that check sit
the local consequences (exponent transport, the degree formula) and an
enumerator of the ramification profiles a pullback map could have.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exactalg import (
    NumberFieldElement,
    RationalFunction,
    X,
    factor_small,
    parse_rational_function,
    squarefree_decomposition,
)
from .fuchsian import INFINITY, DifferentialOperator, exponent_difference, normal_form, singular_points
from .schwarz import SchwarzTriple, hypergeometric_operator

__all__ = [
    "FIBERS",
    "NamedMap",
    "PullbackCertificate",
    "RamificationProfile",
    "SingularSpec",
    "TransportCheck",
    "admissible_degree",
    "certificate_degree_check",
    "check_exponent_transport",
    "degree_formula",
    "enumerate_assignments",
    "exponent_transport",
    "fibers",
    "is_weak_pullback",
    "klein_components",
    "map_profile",
    "named_certificate",
    "named_maps",
    "named_target",
    "pulled_back_normal_form",
    "ramification_profiles",
    "strong_pullback",
]

FIBERS = (Fraction(0), Fraction(1), INFINITY)


def _rf(obj) -> RationalFunction:
    return RationalFunction.lift(obj)


def _log_derivative_of_derivative(xi: RationalFunction) -> RationalFunction:
    d1 = xi.derivative()
    if d1.is_zero():
        raise ValueError("the pullback map must be nonconstant")
    return d1.derivative() / d1


def strong_pullback(Lprime: DifferentialOperator, xi) -> DifferentialOperator:
    """D^2 - (xi''/xi') D + xi'^2 B'(xi) for a normal-form operator B'."""
    if not Lprime.A.is_zero():
        raise ValueError("strong pullback expects a normal-form operator (A = 0)")
    xi = _rf(xi)
    r = _log_derivative_of_derivative(xi)
    d1 = xi.derivative()
    return DifferentialOperator(-r, d1 * d1 * Lprime.B.compose(xi))


def pulled_back_normal_form(Bprime: RationalFunction, xi: RationalFunction) -> RationalFunction:
    """(1/2)(xi''/xi')' - (1/4)(xi''/xi')^2 + xi'^2 B'(xi)."""
    r = _log_derivative_of_derivative(xi)
    d1 = xi.derivative()
    return r.derivative() * Fraction(1, 2) - r * r * Fraction(1, 4) + d1 * d1 * Bprime.compose(xi)


@dataclass(frozen=True)
class PullbackCertificate:
    """Outcome of the exact weak-pullback identity check.

    ``witness`` is the difference of the two sides, or None when it vanishes.
    """

    xi: RationalFunction
    source_triple: SchwarzTriple
    target: DifferentialOperator
    verified: bool
    witness: Optional[RationalFunction] = None

    def to_json(self) -> dict:
        return {
            "xi": str(self.xi),
            "sourceTriple": [str(v) for v in self.source_triple],
            "target": self.target.to_json(),
            "verified": self.verified,
            "witness": None if self.witness is None else str(self.witness),
        }


def is_weak_pullback(L: DifferentialOperator, t: SchwarzTriple, xi) -> PullbackCertificate:
    xi = _rf(xi)
    lhs = normal_form(L).B
    rhs = pulled_back_normal_form(hypergeometric_operator(t).B, xi)
    diff = lhs - rhs
    ok = diff.is_zero()
    return PullbackCertificate(xi, t, L, ok, None if ok else diff)


# ---------------------------------------------------------------------------
# Fibers and exponent transport
# ---------------------------------------------------------------------------


def _value_at_infinity(xi: RationalFunction):
    """(xi(oo), local multiplicity at oo)."""
    n, d = xi.num, xi.den
    if n.degree > d.degree:
        return INFINITY, n.degree - d.degree
    if n.degree < d.degree:
        return Fraction(0), d.degree - max(n.degree, 0)
    c = n.lc / d.lc
    rest = n - d.scale(c)
    return c, d.degree - rest.degree


def fibers(xi, z0) -> list[tuple]:
    """Exact fiber of xi over z0 (rational or INFINITY): list of (point, multiplicity).

    Finite points are monic irreducible polynomials (all their roots share the
    multiplicity); the point at infinity is :data:`INFINITY`.
    """
    xi = _rf(xi)
    poly = xi.den if z0 is INFINITY else (xi.num - xi.den.scale(Fraction(z0)))
    out = []
    if poly.degree >= 1:
        for q, m in factor_small(poly).factors:
            out.append((q, m))
    v, h = _value_at_infinity(xi)
    if v == z0 if z0 is not INFINITY else v is INFINITY:
        out.append((INFINITY, h))
    return out


def map_profile(xi) -> dict:
    """Multiplicity multiset of each fiber over 0, 1, oo: {z: sorted list}."""
    xi = _rf(xi)
    out = {}
    for z in FIBERS:
        poly = xi.den if z is INFINITY else xi.num - xi.den.scale(z)
        mults = []
        for part, m in squarefree_decomposition(poly):
            mults.extend([m] * part.degree)
        v, h = _value_at_infinity(xi)
        if (v is INFINITY) if z is INFINITY else (v is not INFINITY and v == z):
            mults.append(h)
        out[z] = sorted(mults, reverse=True)
    return out


def _fiber_label(z) -> str:
    return "oo" if z is INFINITY else str(z)


def _point_label(p) -> str:
    if p is INFINITY:
        return "oo"
    if p.degree == 1:
        return str(-p.coeff(0))
    return f"roots({p})"


@dataclass(frozen=True)
class TransportCheck:
    point: str
    image: str
    multiplicity: int
    expected: object
    actual: object

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


def _target_difference(t: SchwarzTriple, z) -> Fraction:
    if z is INFINITY:
        return abs(t.nu)
    if z == 0:
        return abs(t.lam)
    if z == 1:
        return abs(t.mu)
    return Fraction(1)


def exponent_transport(cert: PullbackCertificate) -> list[TransportCheck]:
    """Compare rho(L, P) with h * rho(L', xi(P)) at every point where either side can differ from 1.

    Covers the fibers over 0, 1, oo, the critical points of xi, and the
    singular points of L.
    """
    xi, L, t = cert.xi, cert.target, cert.source_triple
    points: dict = {}
    for z in FIBERS:
        for p, h in fibers(xi, z):
            points.setdefault(p, (z, h))
    d1 = xi.derivative()
    crit = [q for q, _ in factor_small(d1.num).factors] if d1.num.degree >= 1 else []
    extra = crit + [sp.location for sp in singular_points(L)]
    for p in extra:
        if p in points:
            continue
        if p is INFINITY:
            points[p] = _value_at_infinity(xi)
        else:
            # ordinary image: multiplicity is one plus the vanishing order of xi'
            points[p] = ("ordinary", 1 + d1.num.order_at(p))
    out = []
    for p, (z, h) in points.items():
        on_fiber = z is INFINITY or (z != "ordinary" and z in (0, 1))
        target = _target_difference(t, z) if on_fiber else Fraction(1)
        actual = exponent_difference(L, p)
        if isinstance(actual, NumberFieldElement) and actual.is_rational():
            actual = actual.to_fraction()
        image = _fiber_label(z) if on_fiber else "ordinary"
        out.append(TransportCheck(_point_label(p), image, h, h * target, actual))
    return out


def check_exponent_transport(cert: PullbackCertificate) -> bool:
    return all(c.ok for c in exponent_transport(cert))


# ---------------------------------------------------------------------------
# Degree formula and ramification profiles
# ---------------------------------------------------------------------------


def degree_formula(rho_f: Iterable, genus: int, rho_fprime: Iterable) -> tuple[Fraction, Fraction]:
    """(2 - 2g + sum(rho_i - 1), 2 + sum(rho'_j - 1)); a degree d is admissible iff lhs = d * rhs."""
    lhs = 2 - 2 * genus + sum((Fraction(r) - 1 for r in rho_f), Fraction(0))
    rhs = 2 + sum((Fraction(r) - 1 for r in rho_fprime), Fraction(0))
    return lhs, rhs


def admissible_degree(lhs: Fraction, rhs: Fraction) -> Optional[Fraction]:
    if rhs == 0:
        return None
    return lhs / rhs


def certificate_degree_check(cert: PullbackCertificate) -> tuple[Fraction, Fraction, int]:
    """(lhs, rhs_per_degree, deg xi) for a genus-0 certificate; lhs should be deg * rhs."""
    rhos = []
    for sp in singular_points(cert.target):
        r = sp.exponent_difference
        if not isinstance(r, Fraction):
            raise ValueError("degree formula needs rational exponent differences")
        rhos.extend([r] * sp.degree)
    lhs, rhs = degree_formula(rhos, 0, [abs(v) for v in cert.source_triple])
    return lhs, rhs, cert.xi.degree


@dataclass(frozen=True)
class SingularSpec:
    """A singular point of the source curve: its label and exponent difference."""

    label: str
    rho: Fraction


@dataclass(frozen=True)
class RamificationProfile:
    """Candidate ramification data of a pullback map.

    ``fiber_data[z]`` lists (point class, multiplicity, count) per fiber z;
    ``ordinary_counts[z]`` is the number of ordinary points over z.
    """

    degree: int
    fiber_data: dict
    ordinary_counts: dict
    assignment: tuple = field(default=())

    def counts(self) -> tuple[int, int, int, int]:
        n = self.ordinary_counts
        return (n[FIBERS[0]], n[FIBERS[1]], n[FIBERS[2]], self.degree)

    def fiber_multiplicities(self, z) -> list[int]:
        out = []
        for _, m, c in self.fiber_data[z]:
            out.extend([m] * c)
        return sorted(out, reverse=True)

    def total_points(self) -> int:
        return sum(c for z in FIBERS for _, _, c in self.fiber_data[z])

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "ordinary": [self.ordinary_counts[z] for z in FIBERS],
            "assignment": [[lab, _fiber_label(z), h] for lab, z, h in self.assignment],
        }


def _forced_multiplicity(rho: Fraction, target: Fraction) -> Optional[int]:
    if target == 0:
        return None
    h = Fraction(rho) / target
    return int(h) if h.denominator == 1 and h > 0 else None


def enumerate_assignments(points: Sequence[SingularSpec], t: SchwarzTriple) -> list[tuple]:
    """All maps of the singular points to fibers {0, 1, oo} with integral multiplicities.

    Each result is a tuple of (label, fiber, multiplicity).
    """
    options = []
    for sp in points:
        opts = []
        for z in FIBERS:
            h = _forced_multiplicity(sp.rho, _target_difference(t, z))
            if h is not None:
                opts.append((sp.label, z, h))
        options.append(opts)
    return [tuple(combo) for combo in itertools.product(*options)]


def ramification_profiles(
    assignment: Optional[Sequence[tuple]],
    t: SchwarzTriple,
    max_degree: int = 60,
    genus: int = 0,
    points: Optional[Sequence[SingularSpec]] = None,
) -> list[RamificationProfile]:
    """Integer solutions of the per-fiber degree condition plus the Hurwitz count.

    ``assignment`` is a sequence of (label, fiber, forced multiplicity); pass
    None together with ``points`` to sweep every consistent assignment.
    Ordinary points over a fiber with exponent difference 1/k have
    multiplicity k; when the difference is not a unit fraction no ordinary
    point may lie over it.
    """
    if assignment is None:
        if points is None:
            raise ValueError("either an assignment or the singular points are required")
        out = []
        for a in enumerate_assignments(points, t):
            out.extend(ramification_profiles(a, t, max_degree, genus))
        return out
    forced = {z: [] for z in FIBERS}
    for label, z, h in assignment:
        if z not in forced:
            raise ValueError(f"fiber {z!r} is not one of 0, 1, oo")
        if not isinstance(h, int) or h < 1:
            raise ValueError(f"inconsistent forced multiplicity {h!r} for {label}")
        forced[z].append((label, h))
    ordinary_mult = {}
    for z in FIBERS:
        inv = 1 / _target_difference(t, z)
        ordinary_mult[z] = int(inv) if inv.denominator == 1 else None
    results = []
    n_sing = len(assignment)
    for d in range(1, max_degree + 1):
        counts = {}
        for z in FIBERS:
            rest = d - sum(h for _, h in forced[z])
            k = ordinary_mult[z]
            if rest < 0:
                break
            if k is None:
                if rest:
                    break
                counts[z] = 0
            elif rest % k:
                break
            else:
                counts[z] = rest // k
        else:
            if n_sing + sum(counts.values()) != 2 - 2 * genus + d:
                continue
            data = {}
            for z in FIBERS:
                rows = [(label, h, 1) for label, h in forced[z]]
                if counts[z]:
                    rows.append(("ordinary", ordinary_mult[z], counts[z]))
                data[z] = rows
            results.append(RamificationProfile(d, data, counts, tuple(assignment)))
    return results


# ---------------------------------------------------------------------------
# Named maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NamedMap:
    name: str
    xi: RationalFunction
    source_triple: SchwarzTriple
    target_description: str


def _klein_bar() -> RationalFunction:
    s = _rf(X)
    return 1 - (s * 64 + 189) * (s * s * 64 + s * 133 + 49) ** 3 / ((s + 1) ** 2 * (7 ** 7 * 27))


def _mobius_m() -> RationalFunction:
    s = _rf(X)
    return s * 189 / (125 - s * 189)


_NAMED: dict = {}


def named_maps() -> dict[str, NamedMap]:
    """The four pullback maps used by the known algebraic Lame instances."""
    if not _NAMED:
        x = _rf(X)
        entries = [
            NamedMap("harmonic-quadratic", (x * x - 1) / (x * x), SchwarzTriple("1/2", "1/3", "1/4"),
                     "Lame l=1/6, B=0, g2=4, g3=0 (in general l with triple 1/2,(2l+1)/4,1/4)"),
            NamedMap("equianharmonic-cubic", 1 - x ** 3, SchwarzTriple("1/2", "1/3", "1/4"),
                     "Lame l=1/4, B=0, g2=0, g3=4 (in general l with triple 1/2,1/3,(2l+1)/6)"),
            NamedMap("prop32-quintic",
                     parse_rational_function("(3*x^3-20*x+20)*(2*x-5)^2/(12*(x-1)^5)"),
                     SchwarzTriple("1/2", "1/3", "1/5"),
                     "Lame l=1/6, B=-1/9, g2=80/3, g3=-80/3"),
            NamedMap("klein-caseXIV",
                     parse_rational_function("s*(157464*s^3-352107*s^2+708750*s-546875)^2/(189*s-125)^5"),
                     SchwarzTriple("1/2", "1/3", "1/5"),
                     "hypergeometric operator with exponent differences 1/2,1/3,2/5"),
        ]
        _NAMED.update({m.name: m for m in entries})
    return dict(_NAMED)


def klein_components() -> tuple[RationalFunction, RationalFunction]:
    """Klein's map and the Moebius normalization whose composite is klein-caseXIV."""
    return _klein_bar(), _mobius_m()


def named_target(name: str) -> DifferentialOperator:
    from .lame import LameParameters, lame_operator

    if name == "harmonic-quadratic":
        return lame_operator(LameParameters("1/6", 0, 4, 0))
    if name == "equianharmonic-cubic":
        return lame_operator(LameParameters("1/4", 0, 0, 4))
    if name == "prop32-quintic":
        return lame_operator(LameParameters("1/6", "-1/9", "80/3", "-80/3"))
    if name == "klein-caseXIV":
        return hypergeometric_operator(SchwarzTriple("1/2", "1/3", "2/5"))
    raise KeyError(f"unknown named map {name!r}")


def named_certificate(name: str, target: Optional[DifferentialOperator] = None) -> PullbackCertificate:
    maps = named_maps()
    if name not in maps:
        raise KeyError(f"unknown named map {name!r}; known: {', '.join(sorted(maps))}")
    m = maps[name]
    return is_weak_pullback(target if target is not None else named_target(name), m.source_triple, m.xi)
