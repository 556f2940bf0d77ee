"""Pointwise evaluation of explicit algebraic solution bases of Lame equations.

For each known instance the solution ratio tau satisfies ``Z(tau) = chi(x)``
where ``Z`` is a polyhedral function and ``chi`` the pullback map (for case
2c, Klein's map composed with ``1 - x^3``).  With ``w`` the Wronskian of the
Lame operator, ``u1 = sqrt(w) / sqrt(tau')`` and ``u2 = tau * u1`` span the
solutions.  Branches of tau are the roots of ``num Z - chi(x0) den Z``,
indexed by increasing argument, then modulus, at the evaluation point.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .exactalg import Polynomial, RationalFunction, squarefree_decomposition
from .fuchsian import DifferentialOperator, WronskianData, wronskian
from .lame import LameParameters, lame_operator
from .pullback import named_maps
from .roots import aberth_roots
from .schwarz import SchwarzEntry, basic_entry

__all__ = [
    "BranchCollisionError",
    "CurveReduction",
    "PointEvaluation",
    "CASES",
    "SolutionBasis",
    "branch_values",
    "curve_branch_count",
    "curve_branch_reduction",
    "evaluate",
    "exceptional_points",
    "regular_points",
    "residual",
    "solution_basis",
    "track_branches",
]

CASES = ("1", "2a", "2b", "2c", "3")


class BranchCollisionError(ArithmeticError):
    """Two branches of tau coincide (or one is at infinity) at the requested point."""


@dataclass(frozen=True)
class SolutionBasis:
    label: str
    params: LameParameters
    operator: DifferentialOperator
    prefactor: WronskianData
    xi: RationalFunction
    polyhedral: SchwarzEntry
    extra_composition: Optional[RationalFunction]
    chain: RationalFunction

    @property
    def degree(self) -> int:
        return self.polyhedral.degree


_CASE_DATA = {
    "1": (("1/6", 0, 4, 0), "IV", "harmonic-quadratic", None),
    "2a": (("1/4", 0, 0, 4), "IV", "equianharmonic-cubic", None),
    "2b": (("1/10", 0, 0, 4), "VI", "equianharmonic-cubic", None),
    "2c": (("7/10", 0, 0, 4), "VI", "equianharmonic-cubic", "klein-caseXIV"),
    "3": (("1/6", "-1/9", "80/3", "-80/3"), "VI", "prop32-quintic", None),
}
_BASES: dict = {}


def solution_basis(label: str, params: Optional[LameParameters] = None) -> SolutionBasis:
    """Basis data for one of the five cases; ``params`` overrides the operator (e.g. for controls)."""
    label = str(label)
    if label not in _CASE_DATA:
        raise ValueError(f"unknown case {label!r}; expected one of {', '.join(CASES)}")
    if params is None and label in _BASES:
        return _BASES[label]
    pvals, entry_label, map_name, extra_name = _CASE_DATA[label]
    p = params if params is not None else LameParameters(*pvals)
    L = lame_operator(p)
    maps = named_maps()
    xi = maps[map_name].xi
    extra = maps[extra_name].xi if extra_name else None
    chain = extra.compose(xi) if extra is not None else xi
    basis = SolutionBasis(label, p, L, wronskian(L).power(Fraction(1, 2)), xi, basic_entry(entry_label), extra, chain)
    if params is None:
        _BASES[label] = basis
    return basis


@dataclass(frozen=True)
class PointEvaluation:
    """Both basis solutions and their first two derivatives at x0 on one branch."""

    case: str
    x0: complex
    branch: int
    tau: complex
    dtau: complex
    u1: tuple
    u2: tuple
    residuals: tuple
    defining_residual: float

    def wronskian_value(self) -> complex:
        return self.u1[0] * self.u2[1] - self.u2[0] * self.u1[1]

    def to_json(self) -> dict:
        def c(z):
            return [float(z.real), float(z.imag)]

        return {
            "case": self.case,
            "x0": c(self.x0),
            "branch": self.branch,
            "tau": c(self.tau),
            "dtau": c(self.dtau),
            "u1": c(self.u1[0]),
            "u2": c(self.u2[0]),
            "du1": c(self.u1[1]),
            "du2": c(self.u2[1]),
            "residuals": [float(r) for r in self.residuals],
            "definingResidual": float(self.defining_residual),
        }


class _Numeric:
    """Cached numeric coefficient arrays for a basis."""

    def __init__(self, b: SolutionBasis):
        Z = b.polyhedral.polyhedral
        self.N = [Z.num.numeric_coeffs()]
        self.D = [Z.den.numeric_coeffs()]
        for _ in range(3):
            self.N.append(np.polyder(self.N[-1]))
            self.D.append(np.polyder(self.D[-1]))
        self.CN = [b.chain.num.numeric_coeffs()]
        self.CD = [b.chain.den.numeric_coeffs()]
        for _ in range(3):
            self.CN.append(np.polyder(self.CN[-1]))
            self.CD.append(np.polyder(self.CD[-1]))
        self.A = (b.operator.A.num.numeric_coeffs(), b.operator.A.den.numeric_coeffs())
        self.B = (b.operator.B.num.numeric_coeffs(), b.operator.B.den.numeric_coeffs())
        g = b.prefactor.log_derivative()
        self.g = (g.num.numeric_coeffs(), g.den.numeric_coeffs())
        gd = g.derivative()
        self.gd = (gd.num.numeric_coeffs(), gd.den.numeric_coeffs())


_NUMERIC: dict = {}


def _numeric(b: SolutionBasis) -> _Numeric:
    key = id(b)
    if key not in _NUMERIC or _NUMERIC[key][0] is not b:
        _NUMERIC[key] = (b, _Numeric(b))
    return _NUMERIC[key][1]


def _rv(pair, x):
    return np.polyval(pair[0], x) / np.polyval(pair[1], x)


def _quotient_derivs(N: list, D: list, w: complex):
    """f and its first three derivatives for f = N/D, via the Leibniz rule on f*D = N.

    Working from the numerator and denominator avoids the cancellation that
    expanded derivative formulas suffer near poles.
    """
    n = [np.polyval(c, w) for c in N]
    d = [np.polyval(c, w) for c in D]
    z0 = n[0] / d[0]
    z1 = (n[1] - z0 * d[1]) / d[0]
    z2 = (n[2] - 2 * z1 * d[1] - z0 * d[2]) / d[0]
    z3 = (n[3] - 3 * z2 * d[1] - 3 * z1 * d[2] - z0 * d[3]) / d[0]
    return z0, z1, z2, z3


def _branches(num: _Numeric, z0: complex, tol: float) -> np.ndarray:
    coeffs = np.polysub(num.N[0], z0 * num.D[0])
    if abs(coeffs[0]) <= 1e-12 * np.abs(coeffs).max():
        raise BranchCollisionError("a branch of tau is at infinity at this point")
    roots = aberth_roots(coeffs, tol=max(tol, 1e-12)).roots
    # Newton polish on N - z0 D
    dc = np.polyder(coeffs)
    for _ in range(3):
        roots = roots - np.polyval(coeffs, roots) / np.polyval(dc, roots)
    order = np.lexsort((np.abs(roots), np.angle(roots)))
    roots = roots[order]
    sep = min(abs(roots[i] - roots[j]) for i in range(len(roots)) for j in range(i + 1, len(roots)))
    if sep <= 1e-6 * max(1.0, float(np.abs(roots).max())):
        raise BranchCollisionError(f"branches of tau collide (separation {sep:.2e}); x0 is near a ramification point")
    return roots


def branch_values(basis: SolutionBasis, x0: complex, tol: float = 1e-12) -> np.ndarray:
    """All branches of tau at x0 in index order."""
    num = _numeric(basis)
    return _branches(num, complex(np.polyval(num.CN[0], x0) / np.polyval(num.CD[0], x0)), tol)


def evaluate(basis: SolutionBasis, x0, branch: int, tol: float = 1e-12) -> PointEvaluation:
    """u1, u2 and derivatives at x0 on the given branch, with residuals against the basis operator."""
    x0 = complex(x0)
    m = basis.degree
    if not 0 <= branch < m:
        raise ValueError(f"branch must lie in [0, {m})")
    num = _numeric(basis)
    pden = np.polyval(basis.params.P.numeric_coeffs(), x0)
    if abs(pden) < 1e-12:
        raise ValueError("x0 is a singular point of the operator")
    if abs(np.polyval(num.CD[0], x0)) < 1e-14:
        raise BranchCollisionError("x0 is a pole of the pullback map")
    chi = [complex(v) for v in _quotient_derivs(num.CN, num.CD, x0)]
    roots = _branches(num, chi[0], tol)
    tau = complex(roots[branch])
    z0, z1, z2, z3 = _quotient_derivs(num.N, num.D, tau)
    if abs(z1) < 1e-300:
        raise BranchCollisionError("tau is at a critical point of the polyhedral function")
    t1 = chi[1] / z1
    t2 = (chi[2] - z2 * t1 ** 2) / z1
    t3 = (chi[3] - z3 * t1 ** 3 - 3 * z2 * t1 * t2) / z1
    if t1 == 0:
        raise BranchCollisionError("tau' vanishes: x0 is a critical point of the pullback map")
    p = basis.prefactor.evaluate(x0)
    g = complex(_rv(num.g, x0))
    gd = complex(_rv(num.gd, x0))
    u = p / cmath.sqrt(t1)
    eta = g - t2 / (2 * t1)
    deta = gd - (t3 * t1 - t2 * t2) / (2 * t1 * t1)
    du = u * eta
    d2u = u * (deta + eta * eta)
    v = tau * u
    dv = t1 * u + tau * du
    d2v = t2 * u + 2 * t1 * du + tau * d2u
    defining = abs(z0 - chi[0]) / max(1.0, abs(chi[0]))
    ev = PointEvaluation(basis.label, x0, branch, tau, t1, (u, du, d2u), (v, dv, d2v), (0.0, 0.0), defining)
    return PointEvaluation(ev.case, x0, branch, tau, t1, ev.u1, ev.u2, residual(basis.operator, ev), defining)


def exceptional_points(basis: SolutionBasis) -> np.ndarray:
    """Points of the x-plane where evaluation degenerates.

    These are the singular points of the operator and the points where the
    composition chain is infinite, critical, or takes the values 0 or 1
    (the critical values of every polyhedral function used here).
    """
    chain = basis.chain
    polys = [basis.params.P, chain.den, chain.num, chain.num - chain.den]
    d = chain.derivative()
    if d.num.degree >= 1:
        polys.append(d.num)
    pts = []
    for p in polys:
        if p.degree >= 1:
            pts.extend(aberth_roots(p.numeric_coeffs()).roots.tolist())
    return np.array(pts, dtype=complex)


def regular_points(basis: SolutionBasis, n: int, seed: int = 0, box: float = 3.0,
                   margin: float = 0.05) -> list[complex]:
    """n seeded random points of [-box, box]^2 at distance > margin from every exceptional point."""
    rng = np.random.default_rng(seed)
    bad = exceptional_points(basis)
    out: list[complex] = []
    while len(out) < n:
        x = complex(*rng.uniform(-box, box, 2))
        if bad.size and np.abs(bad - x).min() <= margin:
            continue
        try:
            branch_values(basis, x)
        except BranchCollisionError:
            continue
        out.append(x)
    return out


def residual(L: DifferentialOperator, ev: PointEvaluation) -> tuple[float, float]:
    """|L u| / max(|u|, |u'|, |u''|) for both basis functions at ev.x0."""
    x0 = ev.x0
    a = complex(L.A.numeric()(x0)) if not L.A.is_zero() else 0j
    b = complex(L.B.numeric()(x0)) if not L.B.is_zero() else 0j
    out = []
    for u, du, d2u in (ev.u1, ev.u2):
        scale = max(abs(u), abs(du), abs(d2u))
        out.append(abs(d2u + a * du + b * u) / scale if scale > 0 else 0.0)
    return tuple(out)


# ---------------------------------------------------------------------------
# Reduction on the elliptic curve
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurveReduction:
    """Whether tau has half the degree over C(x, y) with y^2 = 4 P(x).

    When reduced, ``Z = c (F/G)^2`` and ``chi = k * 4P * h^2``, so the
    defining equation splits as ``F / (s G) = +- y h`` with ``s^2 = k / c``.
    """

    case: str
    reduced: bool
    curve: str
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {"case": self.case, "reduced": self.reduced, "curve": self.curve, "witness": self.witness}


def _square_root_part(p: Polynomial) -> Optional[Polynomial]:
    """Monic h with p = lc * h^2, or None when some multiplicity is odd."""
    if p.degree < 1:
        return Polynomial([1])
    h = Polynomial([1])
    for part, m in squarefree_decomposition(p):
        if m % 2:
            return None
        h = h * part ** (m // 2)
    return h


def _const_times_square(f: RationalFunction):
    hn, hd = _square_root_part(f.num), _square_root_part(f.den)
    if hn is None or hd is None:
        return None
    c = f.num.lc / f.den.lc
    return c, RationalFunction(hn, hd)


def curve_branch_reduction(label: str) -> CurveReduction:
    b = solution_basis(label)
    P = b.params.P
    curve = f"y^2 = {P.scale(4)}"
    z_split = _const_times_square(b.polyhedral.polyhedral)
    chi_split = _const_times_square(b.chain / RationalFunction(P.scale(4)))
    if z_split is None or chi_split is None:
        return CurveReduction(b.label, False, curve, None)
    c, fg = z_split
    k, h = chi_split
    # both splittings are exact identities; re-check them explicitly
    assert b.polyhedral.polyhedral == fg * fg * c
    assert b.chain == h * h * RationalFunction(P.scale(4)) * k
    witness = {
        "identity": f"{b.chain} = ({k})*y^2*({h})^2",
        "relation": f"({fg.num})/(s*({fg.den})) = +-y*({h})",
        "s_squared": str(k / c),
    }
    return CurveReduction(b.label, True, curve, witness)


def curve_branch_count(label: str) -> int:
    red = curve_branch_reduction(label)
    m = solution_basis(label).degree
    return m // 2 if red.reduced else m


# ---------------------------------------------------------------------------
# Continuation of branches
# ---------------------------------------------------------------------------


def track_branches(basis: SolutionBasis, center: complex, radius: float, steps: int = 800,
                   start_angle: float = 0.3) -> list[int]:
    """Permutation of branch indices after continuing once around a small circle.

    Entry i is the index (at the starting point) reached by branch i.
    """
    pts = [center + radius * cmath.exp(1j * (start_angle + 2 * np.pi * k / steps)) for k in range(steps + 1)]
    start = branch_values(basis, pts[0])
    current = start.copy()
    for x in pts[1:]:
        nxt = branch_values(basis, x)
        d = np.abs(current[:, None] - nxt[None, :])
        idx = d.argmin(axis=1)
        if len(set(idx.tolist())) != len(idx):
            raise BranchCollisionError("step too large to follow branches uniquely")
        current = nxt[idx]
    d = np.abs(current[:, None] - start[None, :])
    return [int(i) for i in d.argmin(axis=1)]
