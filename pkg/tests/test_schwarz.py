import itertools
from fractions import Fraction as F

import pytest

from lamealg.exactalg import RationalFunction, X, parse_rational_function
from lamealg.fuchsian import INFINITY, singular_points
from lamealg.schwarz import (
    ICOSAHEDRAL,
    OCTAHEDRAL,
    SQRT_MINUS_3,
    DegenerateTripleError,
    GroupTag,
    SchwarzTriple,
    basic_entry,
    full_schwarz_case,
    full_schwarz_lookup,
    hypergeometric_operator,
    invert_polyhedral,
    normalize_triple,
    polyhedral_map,
)

w = RationalFunction.lift(X)


def _double_pole_coefficient(B: RationalFunction) -> F:
    """lim z^2 B(z) at z = 0."""
    return (B * w * w)(0)


def test_hypergeometric_with_unit_differences_has_no_double_poles():
    L = hypergeometric_operator(SchwarzTriple(1, 1, 1))
    # (1 - 1)/4z^2 + (1 - 1)/4(z-1)^2 + (1 + 1 - 1 - 1)/4z(z-1)
    assert L.B.is_zero()
    assert L.A.is_zero()


def test_hypergeometric_double_pole_coefficient():
    L = hypergeometric_operator(SchwarzTriple("1/2", "1/3", "1/4"))
    assert _double_pole_coefficient(L.B) == F(3, 4) / 4


def test_hypergeometric_singular_differences_match_triple():
    for t in [("1/2", "1/3", "1/5"), ("2/7", "3/5", "1/9"), ("1/2", "1/2", "5/3")]:
        L = hypergeometric_operator(SchwarzTriple(*t))
        d = {s.label(): s.exponent_difference for s in singular_points(L)}
        assert (d["0"], d["1"], d["oo"]) == tuple(F(v) for v in t)


def _equivalents(t):
    """All (+-(l+a), +-(m+b), +-(n+c)) with a+b+c even, as sorted absolute values."""
    out = set()
    for a, b, c in itertools.product(range(-3, 4), repeat=3):
        if (a + b + c) % 2:
            continue
        out.add(tuple(sorted((abs(t[0] + a), abs(t[1] + b), abs(t[2] + c)))))
    return out


@pytest.mark.parametrize("t", [("1/2", "4/3", "1/4"), ("1/2", "1/3", "1/5"), ("1/2", "1/3", "6/5"),
                               ("3/2", "2/3", "-1/5"), ("1/2", "1/3", "2/5")])
def test_normalization_is_reachable_by_even_shifts(t):
    trip = SchwarzTriple(*t)
    n = normalize_triple(trip)
    assert tuple(sorted(n.as_tuple())) in _equivalents(trip.as_tuple())
    assert all(0 < v <= 1 for v in n.as_tuple())


def test_normalization_examples():
    assert normalize_triple(SchwarzTriple("1/2", "4/3", "1/4")).as_tuple() == (F(1, 2), F(1, 3), F(1, 4))
    assert normalize_triple(SchwarzTriple("1/2", "1/3", "1/5")).as_tuple() == (F(1, 2), F(1, 3), F(1, 5))
    assert full_schwarz_case(SchwarzTriple("1/2", "4/3", "1/4")) == ("IV", OCTAHEDRAL)
    assert full_schwarz_case(SchwarzTriple("1/2", "1/3", "6/5")) == ("VI", ICOSAHEDRAL)


def test_lookup_examples():
    assert full_schwarz_lookup(SchwarzTriple("1/2", "1/3", "2/5")) == ICOSAHEDRAL
    assert full_schwarz_lookup(SchwarzTriple("1/2", "1/2", "1/3")) == GroupTag("dihedral", 3)
    assert full_schwarz_lookup(SchwarzTriple("1/2", "1/3", "1/7")) is None


def test_lookup_families():
    for k in ("1/3", "2/3", "4/3", "-1/3"):
        assert full_schwarz_lookup(SchwarzTriple("1/2", k, "1/4")) == OCTAHEDRAL
    for k, g in (("1/4", OCTAHEDRAL), ("3/4", OCTAHEDRAL), ("1/5", ICOSAHEDRAL), ("4/5", ICOSAHEDRAL),
                 ("2/5", ICOSAHEDRAL), ("7/5", ICOSAHEDRAL)):
        assert full_schwarz_lookup(SchwarzTriple("1/2", "1/3", k)) == g
    assert full_schwarz_lookup(SchwarzTriple("1/3", 1, "1/3")) == GroupTag("cyclic", 3)


def test_integral_entry_cannot_be_normalized():
    with pytest.raises(DegenerateTripleError):
        normalize_triple(SchwarzTriple(1, 1, 1))


def test_octahedral_polyhedral_function():
    Z = polyhedral_map(basic_entry("IV"))
    expected = parse_rational_function("-(x^12-33*x^8-33*x^4+1)^2/(108*x^4*(x^4-1)^4)")
    assert Z == expected
    assert Z.degree == 24


def test_octahedral_function_is_group_invariant():
    # rotations of the octahedron with rational coefficients
    Z = polyhedral_map(basic_entry("IV"))
    for g in (-w, 1 / w, (1 + w) / (1 - w)):
        assert Z.compose(g) == Z


def test_icosahedral_and_tetrahedral_degrees():
    assert basic_entry("VI").degree == 60
    II = basic_entry("II")
    assert II.degree == 12
    coeffs = list(II.polyhedral.num.coeffs) + list(II.polyhedral.den.coeffs)
    assert any(getattr(c, "field", None) is SQRT_MINUS_3 and not c.is_rational() for c in coeffs)


def test_dihedral_and_cyclic_degrees():
    assert basic_entry("I", 5).degree == 10
    assert basic_entry("Cyclic", 7).degree == 7


def test_invert_octahedral_over_infinity():
    pts = invert_polyhedral(basic_entry("IV"), INFINITY)
    assert {m for _, m in pts} == {4}
    finite = [complex(p) for p, _ in pts if p is not INFINITY]
    assert len(finite) == 5
    assert all(min(abs(p - q) for p in finite) < 1e-9 for q in (0, 1, -1, 1j, -1j))
    assert any(p is INFINITY for p, _ in pts)


def test_invert_octahedral_over_zero():
    pts = invert_polyhedral(basic_entry("IV"), 0)
    assert len(pts) == 12 and all(m == 2 for _, m in pts)


def test_invert_dihedral_over_one():
    pts = invert_polyhedral(basic_entry("I", 2), 1)
    assert sorted(round(p.real) for p, _ in pts) == [-1, 1]
    assert all(m == 2 for _, m in pts)


def test_invert_generic_point_gives_simple_preimages():
    Z = polyhedral_map(basic_entry("VI"))
    pts = invert_polyhedral(basic_entry("VI"), complex(0.3, 0.7))
    assert len(pts) == 60 and all(m == 1 for _, m in pts)
    num = Z.numeric()
    assert max(abs(num(p) - complex(0.3, 0.7)) for p, _ in pts) < 1e-8
