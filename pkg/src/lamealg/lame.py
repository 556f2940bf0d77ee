"""The algebraic-form Lame operator and the l-based classification of its finite monodromy."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exactalg import Polynomial, RationalFunction, X
from .fuchsian import DifferentialOperator
from .schwarz import ICOSAHEDRAL, OCTAHEDRAL, TETRAHEDRAL, GroupTag, SchwarzTriple

__all__ = [
    "ClassificationVerdict",
    "DegenerateCurveError",
    "EllipticCurveData",
    "KnownInstance",
    "LameParameters",
    "classify_algebraic",
    "classify_weierstrass",
    "elliptic_curve",
    "in_class",
    "j_invariant",
    "known_instances",
    "lame_operator",
    "scale",
]


class DegenerateCurveError(ValueError):
    """The modular discriminant g2^3 - 27 g3^2 vanishes."""


def _q(v) -> Fraction:
    if isinstance(v, float):
        raise TypeError("exact parameters required; pass ints, Fractions or 'p/q' strings")
    return Fraction(v)


def discriminant(g2, g3) -> Fraction:
    g2, g3 = _q(g2), _q(g3)
    return g2 ** 3 - 27 * g3 ** 2


def j_invariant(g2, g3) -> Fraction:
    """J = g2^3 / (g2^3 - 27 g3^2)."""
    d = discriminant(g2, g3)
    if d == 0:
        raise DegenerateCurveError(f"zero discriminant for g2={g2}, g3={g3}")
    return _q(g2) ** 3 / d


@dataclass(frozen=True)
class EllipticCurveData:
    g2: Fraction
    g3: Fraction
    discriminant: Fraction
    j_invariant: Fraction


def elliptic_curve(g2, g3) -> EllipticCurveData:
    return EllipticCurveData(_q(g2), _q(g3), discriminant(g2, g3), j_invariant(g2, g3))


@dataclass(frozen=True)
class LameParameters:
    """(l, B, g2, g3) with P(x) = x^3 - (g2/4) x - g3/4 squarefree."""

    ell: Fraction
    B: Fraction
    g2: Fraction
    g3: Fraction

    def __init__(self, ell, B, g2, g3):
        for name, v in (("ell", ell), ("B", B), ("g2", g2), ("g3", g3)):
            object.__setattr__(self, name, _q(v))
        if discriminant(self.g2, self.g3) == 0:
            raise DegenerateCurveError(f"zero discriminant for g2={self.g2}, g3={self.g3}")

    @property
    def P(self) -> Polynomial:
        return Polynomial([-self.g3 / 4, -self.g2 / 4, 0, 1])

    @property
    def curve(self) -> EllipticCurveData:
        return elliptic_curve(self.g2, self.g3)

    def as_tuple(self) -> tuple:
        return (self.ell, self.B, self.g2, self.g3)

    def __str__(self):
        return ",".join(str(v) for v in self.as_tuple())

    @classmethod
    def parse(cls, text: str) -> "LameParameters":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected l,B,g2,g3 but got {text!r}")
        return cls(*(Fraction(p) for p in parts))


def lame_operator(p: LameParameters) -> DifferentialOperator:
    """D^2 + P'/(2P) D - (l(l+1) x + B)/(4P)."""
    P = p.P
    A = RationalFunction(P.derivative(), P.scale(2))
    B = RationalFunction(-(X.scale(p.ell * (p.ell + 1)) + p.B), P.scale(4))
    return DifferentialOperator(A, B)


def scale(p: LameParameters, alpha) -> LameParameters:
    """(l, alpha B, alpha^2 g2, alpha^3 g3): the operator under x -> x/alpha."""
    alpha = _q(alpha)
    if alpha == 0:
        raise ValueError("scale factor must be nonzero")
    return LameParameters(p.ell, alpha * p.B, alpha ** 2 * p.g2, alpha ** 3 * p.g3)


# ---------------------------------------------------------------------------
# Classification by l
# ---------------------------------------------------------------------------


def in_class(ell, r) -> bool:
    """True when l is congruent to +r or -r modulo the integers."""
    f = _q(ell) % 1
    r = _q(r) % 1
    return f == r or f == (1 - r) % 1


def _cond(r: str) -> str:
    return f"Z+-{r}"


_ALGEBRAIC_RULES = (
    (OCTAHEDRAL, ("1/6", "1/4")),
    (ICOSAHEDRAL, ("1/10", "1/6", "3/10")),
)

_WEIERSTRASS_RULES = (
    ((TETRAHEDRAL, OCTAHEDRAL), ("1/4",)),
    ((OCTAHEDRAL, OCTAHEDRAL), ("1/6",)),
    ((ICOSAHEDRAL, ICOSAHEDRAL), ("1/10", "1/6", "3/10")),
)


@dataclass(frozen=True)
class ClassificationVerdict:
    """Groups that finite projective monodromy could have, given only l.

    ``admissible`` pairs each group (or (curve, base) pair for the
    Weierstrass form) with the congruence it matched.  For 2l in Z the
    classical flag is set and no groups are claimed.
    """

    scope: str
    ell: Fraction
    classical: bool
    admissible: tuple = field(default=())

    def groups(self) -> list:
        seen = []
        for g, _ in self.admissible:
            if g not in seen:
                seen.append(g)
        return seen

    def short_names(self) -> list:
        if self.scope == "weierstrass-form":
            return [[c.short, b.short] for c, b in self.groups()]
        return [g.short for g in self.groups()]

    def to_json(self) -> dict:
        out = {"ell": str(self.ell), "scope": self.scope, "classical": self.classical}
        if self.scope == "weierstrass-form":
            out["pairs"] = self.short_names()
        else:
            out["admissible"] = self.short_names()
        out["conditions"] = [
            [("/".join(x.short for x in g) if isinstance(g, tuple) else g.short), c] for g, c in self.admissible
        ]
        return out


def _classify(ell, rules, scope) -> ClassificationVerdict:
    ell = _q(ell)
    if (2 * ell).denominator == 1:
        return ClassificationVerdict(scope, ell, True, ())
    hits = []
    for group, residues in rules:
        for r in residues:
            if in_class(ell, r):
                hits.append((group, _cond(r)))
    return ClassificationVerdict(scope, ell, False, tuple(hits))


def classify_algebraic(ell) -> ClassificationVerdict:
    """Necessary l-conditions for octahedral or icosahedral monodromy on the line."""
    return _classify(ell, _ALGEBRAIC_RULES, "algebraic-form")


def classify_weierstrass(ell) -> ClassificationVerdict:
    """Possible (curve group, base group) pairs for the Weierstrass form."""
    return _classify(ell, _WEIERSTRASS_RULES, "weierstrass-form")


# ---------------------------------------------------------------------------
# Known algebraic instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KnownInstance:
    label: str
    params: LameParameters
    base_group: GroupTag
    curve_group: GroupTag
    map_name: str
    triple: SchwarzTriple
    composite: Optional[tuple] = None

    def to_json(self) -> dict:
        return {
            "case": self.label,
            "ell": str(self.params.ell),
            "B": str(self.params.B),
            "g2": str(self.params.g2),
            "g3": str(self.params.g3),
            "J": str(self.params.curve.j_invariant),
            "baseGroup": self.base_group.short,
            "curveGroup": self.curve_group.short,
            "map": self.map_name,
            "triple": [str(v) for v in self.triple],
        }


def known_instances() -> list[KnownInstance]:
    """Five Lame operators with finite projective monodromy and their pullback data.

    Case 2c is a pullback of the non-basic triple (1/2, 1/3, 2/5) along
    1 - x^3; ``composite`` records the route through the basic icosahedral
    triple via Klein's map.
    """
    t4 = SchwarzTriple("1/2", "1/3", "1/4")
    t5 = SchwarzTriple("1/2", "1/3", "1/5")
    return [
        KnownInstance("1", LameParameters("1/6", 0, 4, 0), OCTAHEDRAL, OCTAHEDRAL, "harmonic-quadratic", t4),
        KnownInstance("2a", LameParameters("1/4", 0, 0, 4), OCTAHEDRAL, TETRAHEDRAL, "equianharmonic-cubic", t4),
        KnownInstance("2b", LameParameters("1/10", 0, 0, 4), ICOSAHEDRAL, ICOSAHEDRAL, "equianharmonic-cubic", t5),
        KnownInstance("2c", LameParameters("7/10", 0, 0, 4), ICOSAHEDRAL, ICOSAHEDRAL, "equianharmonic-cubic",
                      SchwarzTriple("1/2", "1/3", "2/5"), ("klein-caseXIV", "equianharmonic-cubic", t5)),
        KnownInstance("3", LameParameters("1/6", "-1/9", "80/3", "-80/3"), ICOSAHEDRAL, ICOSAHEDRAL,
                      "prop32-quintic", t5),
    ]
