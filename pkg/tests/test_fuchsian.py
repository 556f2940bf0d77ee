from fractions import Fraction as F

import pytest
import sympy as sp

from lamealg.exactalg import RationalFunction, X, parse_rational_function
from lamealg.fuchsian import (
    INFINITY,
    DifferentialOperator,
    NonFuchsianError,
    exponent_difference,
    fuchs_relation,
    local_exponents,
    normal_form,
    singular_points,
    wronskian,
)
from lamealg.lame import LameParameters, lame_operator
from lamealg.schwarz import SchwarzTriple, hypergeometric_operator

x = RationalFunction.lift(X)
ZERO = RationalFunction(0)
HARMONIC = lame_operator(LameParameters("1/6", 0, 4, 0))


def test_harmonic_lame_singular_points():
    pts = {sp_.label(): sp_ for sp_ in singular_points(HARMONIC)}
    assert set(pts) == {"-1", "0", "1", "oo"}
    for lab in ("-1", "0", "1"):
        assert pts[lab].exponents == (F(0), F(1, 2))
    assert pts["oo"].exponents == (F(-1, 12), F(7, 12))


def test_hypergeometric_exponent_differences():
    L = hypergeometric_operator(SchwarzTriple("1/2", "1/3", "1/4"))
    diffs = {s.label(): s.exponent_difference for s in singular_points(L)}
    assert diffs == {"0": F(1, 2), "1": F(1, 3), "oo": F(1, 4)}


def test_second_derivative_singular_only_at_infinity():
    pts = singular_points(DifferentialOperator(ZERO, ZERO))
    assert [p.location for p in pts] == [INFINITY]
    assert local_exponents(DifferentialOperator(ZERO, ZERO), INFINITY).exponents == (F(-1), F(0))


def test_normal_form_of_normal_operator_is_unchanged():
    L = DifferentialOperator(ZERO, 1 / (x * x + 1))
    assert normal_form(L) == L


def test_normal_form_matches_independent_expansion():
    sx = sp.Symbol("x")
    P = sx ** 3 - sx
    A = sp.diff(P, sx) / (2 * P)
    B = -(sp.Rational(1, 6) * sp.Rational(7, 6) * sx) / (4 * P)
    expected = -sp.diff(A, sx) / 2 - A ** 2 / 4 + B
    ours = normal_form(HARMONIC)
    assert ours.A.is_zero()
    got = sp.sympify(str(ours.B).replace("^", "**"), locals={"x": sx})
    assert sp.simplify(got - expected) == 0


def test_exponent_differences_of_lame():
    p = LameParameters("3/10", "2/7", 0, 4)
    L = lame_operator(p)
    for s in singular_points(L):
        if s.is_infinity:
            assert s.exponent_difference == p.ell + F(1, 2)
        else:
            assert s.exponent_difference == F(1, 2)
    assert exponent_difference(L, F(5)) == 1


def test_fuchs_relation_examples():
    assert fuchs_relation(HARMONIC) == 0
    assert fuchs_relation(hypergeometric_operator(SchwarzTriple("1/2", "1/3", "1/4"))) == 0
    assert fuchs_relation(DifferentialOperator(ZERO, ZERO)) == 0


def test_fuchs_relation_with_irrational_points():
    L = lame_operator(LameParameters("1/6", "-1/9", "80/3", "-80/3"))
    labels = [s.label() for s in singular_points(L)]
    assert labels == ["roots(x^3 - 20/3*x + 20/3)", "oo"]
    assert fuchs_relation(L) == 0


def test_wronskian_examples():
    w = wronskian(HARMONIC)
    assert {str(q): e for q, e in w.factors} == {"x + 1": F(-1, 2), "x": F(-1, 2), "x - 1": F(-1, 2)}
    assert str(wronskian(DifferentialOperator(ZERO, ZERO))) == "1"
    w = wronskian(DifferentialOperator(1 / x, ZERO))
    assert [(str(q), e) for q, e in w.factors] == [("x", F(-1))]
    assert abs(w.evaluate(2.0) - 0.5) < 1e-15


def test_wronskian_log_derivative_is_minus_a():
    L = lame_operator(LameParameters("1/6", "-1/9", "80/3", "-80/3"))
    assert wronskian(L).log_derivative() == -L.A


def test_irregular_point_rejected():
    L = DifferentialOperator(ZERO, 1 / x ** 3)
    with pytest.raises(NonFuchsianError):
        singular_points(L)


def test_equal_exponents_flagged():
    # D^2 + 1/(4x^2): exponents 1/2, 1/2 at 0
    L = DifferentialOperator(ZERO, RationalFunction(F(1, 4)) / (x * x))
    s = [p for p in singular_points(L) if not p.is_infinity][0]
    assert s.equal_exponents and s.exponent_difference == 0


def test_json_round_trip():
    L = lame_operator(LameParameters("1/6", "-1/9", "80/3", "-80/3"))
    assert DifferentialOperator.from_json(L.to_json()) == L
    assert parse_rational_function(L.to_json()["B"]) == L.B
