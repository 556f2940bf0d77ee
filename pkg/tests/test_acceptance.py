"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary.  Running this file directly prints the same lines.
"""

from __future__ import annotations

import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np

from lamealg.exactalg import RationalFunction, X
from lamealg.fuchsian import DifferentialOperator
from lamealg.lame import (
    LameParameters,
    classify_algebraic,
    classify_weierstrass,
    known_instances,
    lame_operator,
)
from lamealg.monodromy import MonodromyConfig, even_subgroup, monodromy_group
from lamealg.pullback import (
    SingularSpec,
    is_weak_pullback,
    named_maps,
    named_target,
    ramification_profiles,
)
from lamealg.schwarz import ICOSAHEDRAL, OCTAHEDRAL, TETRAHEDRAL, SchwarzTriple
from lamealg.solutions import CASES, evaluate, regular_points, solution_basis

HERE = Path(__file__).resolve().parent
_x = RationalFunction.lift(X)


def _line(n: int, title: str, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({detail})"


def _record(log, n, title, ok, detail):
    line = _line(n, title, ok, detail)
    log.append(line)
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 1. exact pullback verification
# ---------------------------------------------------------------------------


def _pullback_cases():
    harmonic = (_x * _x - 1) / (_x * _x)
    cubic = 1 - _x ** 3
    rows = []
    for ell in ("1/6", "1/3", "2/5"):
        e = F(ell)
        rows.append((f"harmonic l={ell}", LameParameters(e, 0, 4, 0),
                     SchwarzTriple(F(1, 2), (2 * e + 1) / 4, F(1, 4)), harmonic))
    for ell in ("1/4", "1/10", "7/10"):
        e = F(ell)
        rows.append((f"equianharmonic l={ell}", LameParameters(e, 0, 0, 4),
                     SchwarzTriple(F(1, 2), F(1, 3), (2 * e + 1) / 6), cubic))
    maps = named_maps()
    q = maps["prop32-quintic"]
    rows.append(("quintic", LameParameters("1/6", "-1/9", "80/3", "-80/3"), q.source_triple, q.xi))
    return rows


def criterion_1() -> tuple[bool, str]:
    worst = 0.0
    failures = []
    for name, p, t, xi in _pullback_cases():
        start = time.perf_counter()
        ok = is_weak_pullback(lame_operator(p), t, xi).verified
        worst = max(worst, time.perf_counter() - start)
        if not ok:
            failures.append(name)
        bumped = LameParameters(p.ell, p.B + F(1, 7), p.g2, p.g3)
        if is_weak_pullback(lame_operator(bumped), t, xi).verified:
            failures.append(name + " (perturbed B verified)")
    k = named_maps()["klein-caseXIV"]
    target = named_target("klein-caseXIV")
    start = time.perf_counter()
    if not is_weak_pullback(target, k.source_triple, k.xi).verified:
        failures.append("klein")
    worst = max(worst, time.perf_counter() - start)
    nudge = RationalFunction.lift(F(1, 7)) / (_x * (_x - 1))
    if is_weak_pullback(DifferentialOperator(target.A, target.B + nudge), k.source_triple, k.xi).verified:
        failures.append("klein (perturbed accessory term verified)")
    ok = not failures and worst < 1.0
    return ok, f"11 certificates, slowest {worst * 1000:.0f} ms" + (f"; failed: {failures}" if failures else "")


def test_criterion_1_exact_pullbacks(acceptance_log):
    _record(acceptance_log, 1, "exact pullback verification", *criterion_1())


# ---------------------------------------------------------------------------
# 2. classification tables
# ---------------------------------------------------------------------------


def _expected_algebraic(k: int) -> set:
    """Residue of 60l mod 60 against the admissible congruences."""
    r = k % 60
    out = set()
    if r in (10, 50, 15, 45):
        out.add("S4")
    if r in (6, 54, 10, 50, 18, 42):
        out.add("A5")
    return out


def _expected_weierstrass(k: int) -> set:
    r = k % 60
    out = set()
    if r in (15, 45):
        out.add(("A4", "S4"))
    if r in (10, 50):
        out.add(("S4", "S4"))
    if r in (6, 54, 10, 50, 18, 42):
        out.add(("A5", "A5"))
    return out


def criterion_2() -> tuple[bool, str]:
    checked, bad = 0, []
    for k in range(1, 120):
        ell = F(k, 60)
        if (2 * ell).denominator == 1:
            continue
        checked += 1
        alg = classify_algebraic(ell)
        wei = classify_weierstrass(ell)
        if alg.classical or set(alg.short_names()) != _expected_algebraic(k):
            bad.append(("algebraic", str(ell)))
        if wei.classical or {tuple(p) for p in wei.short_names()} != _expected_weierstrass(k):
            bad.append(("weierstrass", str(ell)))
    # the five alternatives, each realized by some l on the grid
    alternatives = set()
    for k in range(1, 60):
        for pair in classify_weierstrass(F(k, 60)).admissible:
            alternatives.add((tuple(g.short for g in pair[0]), pair[1]))
    expected_alts = {
        (("A4", "S4"), "Z+-1/4"),
        (("S4", "S4"), "Z+-1/6"),
        (("A5", "A5"), "Z+-1/10"),
        (("A5", "A5"), "Z+-1/6"),
        (("A5", "A5"), "Z+-3/10"),
    }
    if alternatives != expected_alts:
        bad.append(("alternatives", sorted(alternatives)))
    return not bad, f"{checked} grid values, {len(alternatives)} curve alternatives" + (f"; mismatches {bad[:5]}" if bad else "")


def test_criterion_2_classification_tables(acceptance_log):
    _record(acceptance_log, 2, "classification tables", *criterion_2())


# ---------------------------------------------------------------------------
# 3-5. numerical monodromy
# ---------------------------------------------------------------------------

_REPORTS: dict = {}


def _report(label: str):
    if label not in _REPORTS:
        inst = {k.label: k for k in known_instances()}[label]
        _REPORTS[label] = monodromy_group(lame_operator(inst.params), MonodromyConfig(match_tol=1e-6))
    return _REPORTS[label]


def criterion_3() -> tuple[bool, str]:
    start = time.perf_counter()
    labels = [k.label for k in known_instances()]
    reps = [_report(lab) for lab in labels]
    groups = tuple(r.group_name for r in reps)
    sizes = tuple(r.closure_size for r in reps)
    defect = max(r.product_defect for r in reps)
    ok = groups == ("S4", "S4", "A5", "A5", "A5") and sizes == (24, 24, 60, 60, 60) and defect < 1e-8
    return ok, f"groups {groups}, sizes {sizes}, max defect {defect:.1e}, {time.perf_counter() - start:.1f} s"


def test_criterion_3_numerical_monodromy(acceptance_log):
    _record(acceptance_log, 3, "numerical monodromy of the known instances", *criterion_3())


def criterion_4() -> tuple[bool, str]:
    tet = even_subgroup(_report("2a"))
    octa = even_subgroup(_report("1"))
    ok = (tet.closure_size, tet.group) == (12, TETRAHEDRAL) and (octa.closure_size, octa.group) == (24, OCTAHEDRAL)
    return ok, f"(1/4,0,0,4) -> {tet.group_name}/{tet.closure_size}, (1/6,0,4,0) -> {octa.group_name}/{octa.closure_size}"


def test_criterion_4_curve_monodromy(acceptance_log):
    _record(acceptance_log, 4, "curve monodromy via even subgroup", *criterion_4())


def criterion_5() -> tuple[bool, str]:
    harmonic = LameParameters("1/6", 0, 4, 0)
    quintic = LameParameters("1/6", "-1/9", "80/3", "-80/3")
    r1 = _report("1")
    r3 = _report("3")
    ok = (
        harmonic.curve.j_invariant == 1
        and quintic.curve.j_invariant == -80
        and r1.status == "finite" and r1.group == OCTAHEDRAL
        and r3.status == "finite" and r3.group == ICOSAHEDRAL
        and set(classify_algebraic(F(1, 6)).short_names()) == {"S4", "A5"}
    )
    return ok, f"l=1/6: J=1 -> {r1.group_name}, J=-80 -> {r3.group_name}"


def test_criterion_5_nonuniqueness(acceptance_log):
    _record(acceptance_log, 5, "same l, different finite groups", *criterion_5())


# ---------------------------------------------------------------------------
# 6. solution residuals
# ---------------------------------------------------------------------------


def criterion_6() -> tuple[bool, str]:
    rng = np.random.default_rng(20261016)
    worst, control_min = 0.0, np.inf
    for case in CASES:
        basis = solution_basis(case)
        p = basis.params
        control = solution_basis(case, LameParameters(p.ell, p.B + 1, p.g2, p.g3))
        for x0 in regular_points(basis, 20, seed=int(rng.integers(2 ** 31))):
            for br in rng.choice(basis.degree, 3, replace=False):
                worst = max(worst, max(evaluate(basis, x0, int(br)).residuals))
                control_min = min(control_min, min(evaluate(control, x0, int(br)).residuals))
    ok = bool(worst < 1e-8 and control_min > 1e-3)
    return ok, f"worst residual {worst:.1e} over 5x20x3 evaluations; control (B+1) minimum {control_min:.1e}"


def test_criterion_6_solution_residuals(acceptance_log):
    _record(acceptance_log, 6, "solution residuals", *criterion_6())


# ---------------------------------------------------------------------------
# 7. ramification enumeration
# ---------------------------------------------------------------------------


def _lame_points(ell: F) -> list[SingularSpec]:
    return [SingularSpec("e1", F(1, 2)), SingularSpec("e2", F(1, 2)), SingularSpec("e3", F(1, 2)),
            SingularSpec("oo", ell + F(1, 2))]


def criterion_7() -> tuple[bool, str]:
    ico = ramification_profiles(None, SchwarzTriple("1/2", "1/3", "1/5"), points=_lame_points(F(1, 6)))
    ico_counts = {p.counts() for p in ico}
    tet = SchwarzTriple("1/2", "1/3", "1/3")
    nonempty = []
    for k in range(1, 120):
        ell = F(k, 60)
        if (2 * ell).denominator == 1:
            continue
        if ramification_profiles(None, tet, points=_lame_points(ell)):
            nonempty.append(str(ell))
    ok = ico_counts == {(1, 1, 1, 5)} and not nonempty
    return ok, f"icosahedral l=1/6 -> {sorted(ico_counts)}; tetrahedral nonempty for {nonempty or 'none'}"


def test_criterion_7_ramification(acceptance_log):
    _record(acceptance_log, 7, "ramification enumeration", *criterion_7())


# ---------------------------------------------------------------------------
# 8. property suites
# ---------------------------------------------------------------------------


def criterion_8() -> tuple[bool, str]:
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(HERE / "test_properties.py")],
        capture_output=True, text=True, cwd=HERE.parent,
    )
    elapsed = time.perf_counter() - start
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()[-200:]
    return proc.returncode == 0 and elapsed < 30, f"{tail}; {elapsed:.1f} s"


def test_criterion_8_property_suites(acceptance_log):
    _record(acceptance_log, 8, "property suites", *criterion_8())


if __name__ == "__main__":
    results = []
    for n, (title, fn) in enumerate([
        ("exact pullback verification", criterion_1),
        ("classification tables", criterion_2),
        ("numerical monodromy of the known instances", criterion_3),
        ("curve monodromy via even subgroup", criterion_4),
        ("same l, different finite groups", criterion_5),
        ("solution residuals", criterion_6),
        ("ramification enumeration", criterion_7),
        ("property suites", criterion_8),
    ], start=1):
        try:
            ok, detail = fn()
        except Exception as err:  # report and continue with the next criterion
            ok, detail = False, f"{type(err).__name__}: {err}"
        results.append(ok)
        print(_line(n, title, ok, detail))
    sys.exit(0 if all(results) else 1)
