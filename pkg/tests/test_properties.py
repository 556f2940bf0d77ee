"""Randomized property suites for the exact and structural layers."""

from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from lamealg.exactalg import NumberFieldElement, Polynomial, RationalFunction, X
from lamealg.fuchsian import fuchs_relation, normal_form
from lamealg.lame import DegenerateCurveError, LameParameters, classify_algebraic, classify_weierstrass, lame_operator
from lamealg.pullback import (
    FIBERS,
    certificate_degree_check,
    check_exponent_transport,
    is_weak_pullback,
    map_profile,
    named_certificate,
    named_maps,
)
from lamealg.schwarz import (
    SQRT_MINUS_3,
    DegenerateTripleError,
    SchwarzTriple,
    basic_entries,
    basic_entry,
    hypergeometric_operator,
    invert_polyhedral,
    normalize_triple,
)

FAST = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])

small_q = st.builds(F, st.integers(-9, 9), st.integers(1, 6))
nonzero_q = small_q.filter(lambda q: q != 0)


@st.composite
def polynomials(draw, max_degree=3):
    return Polynomial(draw(st.lists(small_q, min_size=1, max_size=max_degree + 1)))


@st.composite
def rational_functions(draw):
    num = draw(polynomials())
    den = draw(polynomials().filter(lambda p: not p.is_zero()))
    return RationalFunction(num, den)


@st.composite
def field_elements(draw):
    a, b = draw(small_q), draw(small_q)
    return NumberFieldElement(SQRT_MINUS_3, Polynomial([a, b]))


# ---------------------------------------------------------------------------
# field axioms
# ---------------------------------------------------------------------------


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(rational_functions(), rational_functions(), rational_functions())
def test_rational_function_field_axioms(f, g, h):
    zero, one = RationalFunction(0), RationalFunction(1)
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + zero == f and f * one == f
    assert f + (-f) == zero
    if not f.is_zero():
        assert f * f.inverse() == one
        assert (g / f) * f == g


@settings(max_examples=1000, deadline=None)
@given(field_elements(), field_elements(), field_elements())
def test_number_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if not a.is_zero():
        assert a * a.inverse() == NumberFieldElement(SQRT_MINUS_3, Polynomial([1]))


def test_sqrt_minus_three_squares_to_minus_three():
    t = SQRT_MINUS_3.gen
    assert t * t == NumberFieldElement(SQRT_MINUS_3, Polynomial([-3]))


# ---------------------------------------------------------------------------
# differentiation rules
# ---------------------------------------------------------------------------


@FAST
@given(rational_functions(), rational_functions())
def test_leibniz_rule(f, g):
    assert (f * g).derivative() == f.derivative() * g + f * g.derivative()


@FAST
@given(rational_functions(), rational_functions())
def test_quotient_rule(f, g):
    if g.is_zero():
        return
    assert (f / g).derivative() == (f.derivative() * g - f * g.derivative()) / (g * g)


@FAST
@given(rational_functions(), polynomials(max_degree=2))
def test_chain_rule(f, p):
    if p.degree < 1:
        return
    g = RationalFunction(p)
    assert f.compose(g).derivative() == f.derivative().compose(g) * g.derivative()


# ---------------------------------------------------------------------------
# Fuchs relation and normal form
# ---------------------------------------------------------------------------


@FAST
@given(small_q, small_q, small_q, small_q)
def test_fuchs_relation_lame_family(ell, B, g2, g3):
    try:
        p = LameParameters(ell, B, g2, g3)
    except DegenerateCurveError:
        return
    assert fuchs_relation(lame_operator(p)) == 0


@FAST
@given(nonzero_q, nonzero_q, nonzero_q)
def test_fuchs_relation_hypergeometric_family(a, b, c):
    assert fuchs_relation(hypergeometric_operator(SchwarzTriple(a, b, c))) == 0


@FAST
@given(small_q, small_q, small_q, small_q)
def test_normal_form_idempotent(ell, B, g2, g3):
    try:
        L = lame_operator(LameParameters(ell, B, g2, g3))
    except DegenerateCurveError:
        return
    n = normal_form(L)
    assert n.A.is_zero()
    assert normal_form(n) == n


# ---------------------------------------------------------------------------
# certificates: exponent transport and the degree formula
# ---------------------------------------------------------------------------


def _verified_certificates():
    certs = [named_certificate(name) for name in named_maps()]
    x = RationalFunction.lift(X)
    for ell in (F(1, 6), F(1, 3), F(2, 5), F(7, 6)):
        certs.append(is_weak_pullback(lame_operator(LameParameters(ell, 0, 4, 0)),
                                      SchwarzTriple(F(1, 2), (2 * ell + 1) / 4, F(1, 4)), (x * x - 1) / (x * x)))
    for ell in (F(1, 4), F(1, 10), F(7, 10), F(3, 10)):
        certs.append(is_weak_pullback(lame_operator(LameParameters(ell, 0, 0, 4)),
                                      SchwarzTriple(F(1, 2), F(1, 3), (2 * ell + 1) / 6), 1 - x ** 3))
    return certs


CERTS = _verified_certificates()


def test_all_listed_certificates_verify():
    assert all(c.verified for c in CERTS)


def test_exponent_transport_on_verified_certificates():
    for cert in CERTS:
        assert check_exponent_transport(cert), str(cert.xi)


def test_degree_formula_on_verified_certificates():
    for cert in CERTS:
        lhs, rhs, deg = certificate_degree_check(cert)
        assert lhs == deg * rhs, (str(cert.xi), lhs, rhs, deg)


@FAST
@given(st.integers(-40, 40), st.sampled_from([2, 3, 4, 5, 6, 10, 12]))
def test_harmonic_pullback_holds_for_every_l(k, q):
    ell = F(k, q)
    if ell + F(1, 2) == 0:
        return
    x = RationalFunction.lift(X)
    cert = is_weak_pullback(lame_operator(LameParameters(ell, 0, 4, 0)),
                            SchwarzTriple(F(1, 2), (2 * ell + 1) / 4, F(1, 4)), (x * x - 1) / (x * x))
    assert cert.verified


# ---------------------------------------------------------------------------
# polyhedral functions
# ---------------------------------------------------------------------------


def test_polyhedral_degrees():
    degrees = {e.case_label: e.degree for e in basic_entries() if e.case_label in ("II", "IV", "VI")}
    assert degrees == {"II": 12, "IV": 24, "VI": 60}


# (fiber over 0, 1, oo): number of points x cycle length, from the exponent differences 1/2, 1/3, 1/k
CYCLES = {
    "II": ((6, 2), (4, 3), (4, 3)),
    "IV": ((12, 2), (8, 3), (6, 4)),
    "VI": ((30, 2), (20, 3), (12, 5)),
}


def test_fiber_cycle_structure_exact():
    for label in ("IV", "VI"):
        prof = map_profile(basic_entry(label).polyhedral)
        for z, (count, length) in zip(FIBERS, CYCLES[label]):
            assert prof[z] == [length] * count, (label, z)


def test_fiber_cycle_structure_numeric():
    for label, rows in CYCLES.items():
        e = basic_entry(label)
        for z, (count, length) in zip(FIBERS, rows):
            pts = invert_polyhedral(e, z)
            assert len(pts) == count, (label, z)
            assert {m for _, m in pts} == {length}, (label, z)


# ---------------------------------------------------------------------------
# classification symmetry
# ---------------------------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(st.integers(-300, 300), st.integers(1, 60))
def test_classification_symmetric_under_l_to_minus_l_minus_one(k, q):
    ell = F(k, q)
    mirror = -ell - 1
    a, b = classify_algebraic(ell), classify_algebraic(mirror)
    assert (a.classical, a.short_names()) == (b.classical, b.short_names())
    c, d = classify_weierstrass(ell), classify_weierstrass(mirror)
    assert (c.classical, c.short_names()) == (d.classical, d.short_names())


def test_integral_entries_rejected_by_normalization():
    with pytest.raises(DegenerateTripleError):
        normalize_triple(SchwarzTriple(1, F(1, 2), F(1, 3)))
