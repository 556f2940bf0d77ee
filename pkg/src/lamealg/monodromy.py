"""Numerical monodromy of second-order Fuchsian operators and finite-group recognition.

Loops are keyholes from a common basepoint: a straight segment towards each
finite singular point, one counterclockwise circle around it, and the same
segment back.  Integrating the companion system ``Y' = [[0, 1], [-B, -A]] Y``
along a loop with ``Y(b) = I`` gives the transfer matrix of that loop.  The
generator at infinity is the inverse of the ordered product of the finite
ones, and a separately integrated large circle measures the product defect.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .exactalg import Polynomial
from .fuchsian import DifferentialOperator, singular_points
from .roots import aberth_roots
from .schwarz import ICOSAHEDRAL, OCTAHEDRAL, TETRAHEDRAL, GroupTag

__all__ = [
    "IllConditionedClosure",
    "IntegrationError",
    "LoopPath",
    "MonodromyConfig",
    "MonodromyReport",
    "analytic_continue",
    "circle_loop",
    "closure",
    "even_subgroup",
    "keyhole_loop",
    "monodromy_group",
    "projective_order",
    "recognize_group",
    "singular_locations_numeric",
]


class IntegrationError(ArithmeticError):
    """The integrator failed (step underflow or non-finite values)."""


class IllConditionedClosure(ArithmeticError):
    """Two group elements are neither clearly equal nor clearly distinct."""

    def __init__(self, distance: float, tol: float):
        super().__init__(
            f"closure ambiguous: nearest distance {distance:.3e} lies within 10x the matching tolerance {tol:.1e}; "
            "rerun with a tighter integration tolerance"
        )
        self.distance = distance


@dataclass(frozen=True)
class MonodromyConfig:
    """All numerical knobs; recorded in every report."""

    integration_tol: float = 1e-12
    match_tol: float = 1e-6
    closure_cap: int = 400
    root_residual: float = 1e-12
    clearance: float = 0.25
    basepoint: Optional[complex] = None
    escalate: bool = True
    max_order: int = 120

    def __post_init__(self):
        for name in ("integration_tol", "match_tol", "root_residual", "clearance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.closure_cap < 1:
            raise ValueError("closure_cap must be positive")

    def to_json(self) -> dict:
        d = asdict(self)
        if self.basepoint is not None:
            d["basepoint"] = [self.basepoint.real, self.basepoint.imag]
        return d


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    kind: str  # "line" or "arc"
    start: complex
    end: complex
    center: complex = 0j
    turns: float = 0.0

    def point(self, t: float) -> complex:
        if self.kind == "line":
            return self.start + t * (self.end - self.start)
        return self.center + (self.start - self.center) * cmath.exp(2j * math.pi * self.turns * t)

    def velocity(self, t: float) -> complex:
        if self.kind == "line":
            return self.end - self.start
        return 2j * math.pi * self.turns * (self.point(t) - self.center)


@dataclass(frozen=True)
class LoopPath:
    basepoint: complex
    segments: tuple

    @property
    def waypoints(self) -> list[complex]:
        return [self.basepoint] + [s.end for s in self.segments]

    def is_closed(self) -> bool:
        return abs(self.segments[-1].end - self.basepoint) < 1e-12 * max(1.0, abs(self.basepoint))

    def sample(self, n: int = 64) -> np.ndarray:
        ts = np.linspace(0, 1, n)
        return np.array([s.point(t) for s in self.segments for t in ts])

    def clearance(self, points: Sequence[complex]) -> float:
        pts = self.sample(400)
        return min(float(np.abs(pts - p).min()) for p in points) if len(points) else math.inf


def _line(a: complex, b: complex) -> Segment:
    return Segment("line", complex(a), complex(b))


def _arc(start: complex, center: complex, turns: float) -> Segment:
    end = center + (start - center) * cmath.exp(2j * math.pi * turns)
    return Segment("arc", complex(start), complex(end), complex(center), turns)


def keyhole_loop(basepoint: complex, point: complex, radius: float) -> LoopPath:
    """Out along the segment, once counterclockwise around ``point``, and back."""
    d = basepoint - point
    if d == 0:
        raise ValueError("the basepoint cannot be the encircled point")
    entry = point + radius * d / abs(d)
    circ = _arc(entry, point, 1.0)
    return LoopPath(basepoint, (_line(basepoint, entry), replace(circ, end=entry), _line(entry, basepoint)))


def circle_loop(basepoint: complex, center: complex, radius: float) -> LoopPath:
    """Radially out to a circle about ``center``, once around counterclockwise, and back."""
    d = basepoint - center
    entry = center + radius * (d / abs(d) if d else 1)
    circ = _arc(entry, center, 1.0)
    segs = (replace(circ, end=entry),) if abs(entry - basepoint) < 1e-14 else (
        _line(basepoint, entry), replace(circ, end=entry), _line(entry, basepoint))
    return LoopPath(basepoint, segs)


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------


def _horner(coeffs: tuple, x: complex) -> complex:
    acc = 0j
    for c in coeffs:
        acc = acc * x + c
    return acc


class _Coefficients:
    def __init__(self, L: DifferentialOperator):
        def hl(p: Polynomial):
            return tuple(complex(c) for c in reversed(p.coeffs)) or (0j,)

        self.an, self.ad = hl(L.A.num), hl(L.A.den)
        self.bn, self.bd = hl(L.B.num), hl(L.B.den)

    def __call__(self, x: complex):
        return _horner(self.an, x) / _horner(self.ad, x), _horner(self.bn, x) / _horner(self.bd, x)


def _integrate_segment(coef: _Coefficients, seg: Segment, y0: np.ndarray, tol: float) -> np.ndarray:
    def rhs(t, y):
        x = seg.point(t)
        v = seg.velocity(t)
        a, b = coef(x)
        return np.array([y[2], y[3], -b * y[0] - a * y[2], -b * y[1] - a * y[3]]) * v

    sol = solve_ivp(rhs, (0.0, 1.0), y0, method="DOP853", rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise IntegrationError(f"integration failed on {seg.kind} segment: {sol.message}")
    y = sol.y[:, -1]
    if not np.all(np.isfinite(y)):
        raise IntegrationError("non-finite values during integration")
    return y


def analytic_continue(L: DifferentialOperator, path: LoopPath, tol: float = 1e-12, y0=None) -> np.ndarray:
    """Transfer matrix of ``path`` acting on (u, u') data at the basepoint."""
    coef = _Coefficients(L)
    y = np.eye(2, dtype=complex).reshape(4) if y0 is None else np.asarray(y0, dtype=complex).reshape(4)
    for seg in path.segments:
        y = _integrate_segment(coef, seg, y, tol)
    return y.reshape(2, 2)


# ---------------------------------------------------------------------------
# Projective group utilities
# ---------------------------------------------------------------------------


def _normalize(m: np.ndarray) -> np.ndarray:
    """Scale to unit determinant with a deterministic sign choice."""
    m = np.asarray(m, dtype=complex)
    d = np.linalg.det(m)
    m = m / np.sqrt(d)
    flat = m.reshape(-1)
    k = int(np.argmax(np.abs(flat) > 1e-8 * np.abs(flat).max()))
    # first significant entry gets nonnegative real part (ties: imaginary)
    c = flat[k]
    if c.real < -1e-12 or (abs(c.real) <= 1e-12 and c.imag < 0):
        m = -m
    return m


def _proj_dist(stack: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Distance in PSL2: min over sign of the max-entry difference, relative to entry size."""
    scale = max(1.0, float(np.abs(m).max()))
    d1 = np.abs(stack - m).reshape(len(stack), -1).max(axis=1)
    d2 = np.abs(stack + m).reshape(len(stack), -1).max(axis=1)
    return np.minimum(d1, d2) / scale


def projective_order(m: np.ndarray, tol: float = 1e-6, max_order: int = 120) -> int:
    """Least k with m^k scalar (within tol), or 0 if none up to max_order."""
    g = _normalize(m)
    p = np.eye(2, dtype=complex)
    ident = np.eye(2, dtype=complex)[None]
    for k in range(1, max_order + 1):
        p = p @ g
        if _proj_dist(ident, p)[0] <= tol:
            return k
    return 0


@dataclass
class ClosureResult:
    elements: np.ndarray
    complete: bool
    nearest_ambiguous: float


def closure(generators: Sequence[np.ndarray], tol: float = 1e-6, cap: int = 400) -> ClosureResult:
    """Breadth-first closure in PSL2 of the given matrices."""
    gens = [_normalize(g) for g in generators]
    elems = [np.eye(2, dtype=complex)]
    stack = np.array(elems)
    frontier = [0]
    ambiguous = math.inf
    while frontier:
        nxt = []
        for i in frontier:
            for g in gens:
                cand = _normalize(stack[i] @ g)
                d = _proj_dist(stack, cand)
                near = float(d.min())
                if near <= tol:
                    continue
                if near <= 10 * tol:
                    raise IllConditionedClosure(near, tol)
                ambiguous = min(ambiguous, near)
                elems.append(cand)
                stack = np.concatenate([stack, cand[None]])
                nxt.append(len(elems) - 1)
                if len(elems) > cap:
                    return ClosureResult(stack, False, ambiguous)
        frontier = nxt
    return ClosureResult(stack, True, ambiguous)


def _order_statistics(elements: np.ndarray, tol: float, max_order: int) -> dict:
    return dict(sorted(Counter(projective_order(e, tol, max_order) for e in elements).items()))


_SIGNATURES = {
    TETRAHEDRAL: {1: 1, 2: 3, 3: 8},
    OCTAHEDRAL: {1: 1, 2: 9, 3: 8, 4: 6},
    ICOSAHEDRAL: {1: 1, 2: 15, 3: 20, 5: 24},
}


def recognize_group(order_stats: dict) -> Optional[GroupTag]:
    """Identify a finite subgroup of PSL2 from its element-order multiset."""
    n = sum(order_stats.values())
    if 0 in order_stats:
        return None
    for tag, sig in _SIGNATURES.items():
        if order_stats == sig:
            return tag
    if max(order_stats) == n:
        return GroupTag("cyclic", n)
    if n % 2 == 0 and n >= 4:
        half = n // 2
        invol = order_stats.get(2, 0)
        if half == 2 and order_stats == {1: 1, 2: 3}:
            return GroupTag("dihedral", 2)
        if max(order_stats) == half and invol >= half:
            return GroupTag("dihedral", half)
    return None


# ---------------------------------------------------------------------------
# Monodromy reports
# ---------------------------------------------------------------------------


@dataclass
class MonodromyReport:
    """Generators (finite points in loop order, then infinity) and the recognized group.

    ``status`` is "finite" with a recognized ``group``, "unrecognized" for a
    finite closure that matches no known signature, or "undetermined" when
    the closure cap was exceeded (consistent with infinite monodromy).
    """

    generators: list
    labels: list
    locations: list
    projective_orders: list
    status: str
    group: Optional[GroupTag]
    closure_size: int
    max_residual: float
    product_defect: float
    basepoint: complex
    order_statistics: dict
    config: MonodromyConfig
    elements: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def group_name(self) -> str:
        if self.group is not None:
            return self.group.short
        return "Infinite/Undetermined" if self.status == "undetermined" else "Unrecognized"

    def to_json(self) -> dict:
        def mat(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]

        return {
            "status": self.status,
            "group": self.group_name,
            "closureSize": self.closure_size,
            "generators": [mat(g) for g in self.generators],
            "labels": self.labels,
            "projectiveOrders": self.projective_orders,
            "orderStatistics": {str(k): v for k, v in self.order_statistics.items()},
            "maxResidual": self.max_residual,
            "productDefect": self.product_defect,
            "basepoint": [self.basepoint.real, self.basepoint.imag],
            "config": self.config.to_json(),
        }


def singular_locations_numeric(P: Polynomial, tol: float = 1e-12) -> list[complex]:
    """All complex roots of a squarefree polynomial, sorted by (real, imaginary)."""
    res = aberth_roots(P.numeric_coeffs(), tol=tol)
    return sorted((complex(z) for z in res.roots), key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def _finite_singularities(L: DifferentialOperator, tol: float):
    """(location, residue of A, label) for each finite singular point."""
    out = []
    for sp in singular_points(L):
        if sp.is_infinity:
            continue
        q = sp.location
        A = L.A
        locs = singular_locations_numeric(q, tol) if q.degree > 1 else [complex(sp.root)]
        for z in locs:
            # residue of A at a simple root z of q
            res_a = 0j
            if A.den.order_at(q) == 1:
                cof = A.den.exact_div(q)
                res_a = complex(A.num(z) / (q.derivative()(z) * cof(z)))
            label = sp.label() if q.degree == 1 else f"{z.real:.6g}{z.imag:+.6g}i"
            out.append((z, res_a, label))
    return out


def _segment_distance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    t = max(0.0, min(1.0, ((p - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(a + t * d - p)


def _radii(points: list[complex], clearance: float) -> list[float]:
    out = []
    for i, p in enumerate(points):
        others = [abs(p - q) for j, q in enumerate(points) if j != i]
        out.append(min([clearance] + [0.4 * d for d in others]))
    return out


def _choose_basepoint(points: list[complex], radii: list[float]) -> complex:
    re = [p.real for p in points]
    im = [p.imag for p in points]
    spread = max(max(re) - min(re), max(im) - min(im), 1.0)
    x0 = max(re) + max(1.0, 0.5 * spread)
    yc = 0.5 * (max(im) + min(im))
    best, best_score = None, -math.inf
    for k in range(41):
        b = complex(x0, yc + spread * (k - 20) / 20.0 + 0.01 * spread)
        score = math.inf
        for i, p in enumerate(points):
            for j, q in enumerate(points):
                if i != j:
                    score = min(score, _segment_distance(b, p, q) / radii[j])
        if score > best_score:
            best, best_score = b, score
    return best


def _generator_order(points: list[complex], b: complex) -> list[int]:
    """Indices sorted so that the product of keyholes equals the big counterclockwise circle.

    Angles of p - b are measured relative to the direction from b to the
    centroid, so they never wrap for a basepoint outside the point cloud.
    """
    c = complex(np.mean(points))
    ref = (c - b) / abs(c - b)
    ang = [cmath.phase((p - b) / ref) for p in points]
    return sorted(range(len(points)), key=lambda i: ang[i])


def _compute_generators(L: DifferentialOperator, cfg: MonodromyConfig, tol: float):
    sing = _finite_singularities(L, cfg.root_residual)
    points = [s[0] for s in sing]
    if not points:
        raise ValueError("operator has no finite singular points")
    radii = _radii(points, cfg.clearance)
    b = cfg.basepoint if cfg.basepoint is not None else _choose_basepoint(points, radii)
    order = _generator_order(points, b)
    mats, labels, locs, residuals = [], [], [], []
    for i in order:
        z, res_a, label = sing[i]
        T = analytic_continue(L, keyhole_loop(b, z, radii[i]), tol)
        mats.append(T)
        labels.append(label)
        locs.append(z)
        residuals.append(abs(np.linalg.det(T) - cmath.exp(-2j * math.pi * res_a)))
    # transfer matrices compose right-to-left: the first loop is applied first
    prod = np.eye(2, dtype=complex)
    for T in mats:
        prod = T @ prod
    center = complex(np.mean(points))
    big_r = max(abs(p - center) for p in points) + 2 * max(radii) + abs(b - center)
    big = analytic_continue(L, circle_loop(b, center, big_r), tol)
    defect = float(np.abs(prod - big).max() / max(1.0, np.abs(big).max()))
    mats.append(np.linalg.inv(prod))
    labels.append("oo")
    locs.append(complex("inf"))
    return mats, labels, locs, max(residuals), defect, b


def _finish(gens, labels, locs, residual, defect, b, cfg) -> MonodromyReport:
    orders = [projective_order(g, cfg.match_tol, cfg.max_order) for g in gens]
    cl = closure(gens, cfg.match_tol, cfg.closure_cap)
    if not cl.complete:
        return MonodromyReport(gens, labels, locs, orders, "undetermined", None, len(cl.elements),
                               residual, defect, b, {}, cfg, cl.elements)
    stats = _order_statistics(cl.elements, cfg.match_tol, cfg.max_order)
    tag = recognize_group(stats)
    return MonodromyReport(gens, labels, locs, orders, "finite" if tag else "unrecognized", tag,
                           len(cl.elements), residual, defect, b, stats, cfg, cl.elements)


def monodromy_group(L: DifferentialOperator, cfg: Optional[MonodromyConfig] = None) -> MonodromyReport:
    """Generators around every singular point and the projective group they generate."""
    cfg = cfg or MonodromyConfig()
    tols = [cfg.integration_tol]
    if cfg.escalate:
        tols += [t for t in (cfg.integration_tol * 1e-1, cfg.integration_tol * 1e-2) if t >= 2.5e-14]
    last_err = None
    for tol in tols:
        gens, labels, locs, residual, defect, b = _compute_generators(L, cfg, tol)
        try:
            return _finish(gens, labels, locs, residual, defect, b, cfg)
        except IllConditionedClosure as err:
            last_err = err
    raise last_err


def even_subgroup(report: MonodromyReport) -> MonodromyReport:
    """Subgroup generated by products of pairs of the branch-point generators.

    For the Lame operator these are the loops that lift to closed loops on
    the elliptic double cover branched over e1, e2, e3 and infinity.
    """
    cfg = report.config
    gens = report.generators
    pairs = [gens[i] @ gens[j] for i in range(len(gens)) for j in range(len(gens)) if i != j]
    labels = [f"{report.labels[i]}*{report.labels[j]}" for i in range(len(gens)) for j in range(len(gens)) if i != j]
    orders = [projective_order(g, cfg.match_tol, cfg.max_order) for g in pairs]
    cl = closure(pairs, cfg.match_tol, cfg.closure_cap)
    if not cl.complete:
        return MonodromyReport(pairs, labels, [], orders, "undetermined", None, len(cl.elements),
                               report.max_residual, report.product_defect, report.basepoint, {}, cfg, cl.elements)
    stats = _order_statistics(cl.elements, cfg.match_tol, cfg.max_order)
    tag = recognize_group(stats)
    return MonodromyReport(pairs, labels, [], orders, "finite" if tag else "unrecognized", tag, len(cl.elements),
                           report.max_residual, report.product_defect, report.basepoint, stats, cfg, cl.elements)
