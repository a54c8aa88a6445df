from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from triangle_cyclicity import polyalg as pa

X, Y = sp.symbols("x y")


@st.composite
def poly_text(draw, max_deg=3):
    terms = []
    for i in range(max_deg + 1):
        for j in range(max_deg + 1 - i):
            c = draw(st.integers(-9, 9))
            if c:
                terms.append(f"({c})*x^{i}*y^{j}")
    return " + ".join(terms) if terms else "0"


def to_sympy(p: pa.ExactPoly):
    return sp.expand(sp.sympify(pa.format_poly(p).replace("^", "**"), locals={"x": X, "y": Y, "h": sp.Symbol("h"), "w": sp.Symbol("w")}))


def same(p: pa.ExactPoly, q) -> bool:
    return sp.expand(to_sympy(p) - q) == 0


@given(poly_text(), poly_text())
@settings(max_examples=60, deadline=None)
def test_arithmetic_matches_sympy(a, b):
    p, q = pa.parse(a, ("x", "y")), pa.parse(b, ("x", "y"))
    sa, sb = sp.sympify(a.replace("^", "**")), sp.sympify(b.replace("^", "**"))
    assert same(p + q, sa + sb)
    assert same(p - q, sa - sb)
    assert same(p * q, sa * sb)
    assert same(p ** 2, sa ** 2)
    assert same(p.diff("x"), sp.diff(sa, X))


@given(poly_text())
@settings(max_examples=60, deadline=None)
def test_format_parse_roundtrip(a):
    p = pa.parse(a, ("x", "y"))
    assert pa.parse(pa.format_poly(p), ("x", "y")) == p


@given(poly_text(2), poly_text(2))
@settings(max_examples=40, deadline=None)
def test_resultant_matches_sympy(a, b):
    p, q = pa.parse(a, ("x", "y")), pa.parse(b, ("x", "y"))
    if p.degree("x") < 1 or q.degree("x") < 1:
        return
    sa, sb = sp.sympify(a.replace("^", "**")), sp.sympify(b.replace("^", "**"))
    assert same(pa.resultant(p, q, "x"), sp.resultant(sa, sb, X))


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_sturm_count_matches_sympy(roots, lead):
    # product of linear factors with repeated roots plus an irreducible quadratic
    x = sp.Symbol("x")
    expr = lead * (x * x + 1) * sp.prod([(x - sp.Rational(r, 2)) for r in roots])
    p = pa.parse(str(sp.expand(expr)).replace("**", "^"), ("x",))
    for a, b in [(-2, 2), (Fraction(-1, 2), Fraction(3, 2)), (0, 3)]:
        want = len({r for r in sp.real_roots(expr) if a < r < b})
        assert pa.sturm_count(p, a, b) == want


def test_parse_errors():
    with pytest.raises(pa.PolynomialError):
        pa.parse("x +* 2")
    with pytest.raises(pa.PolynomialError):
        pa.parse("(x + 1")


def test_exact_rational_evaluation():
    p = pa.parse("x^2/3 - y", ("x", "y"))
    assert p(Fraction(3), Fraction(1, 2)) == Fraction(5, 2)
    assert isinstance(p(Fraction(1), Fraction(1)), Fraction)


def test_resultant_roundtrip_example():
    p, q = pa.parse("x^2 - y", ("x", "y")), pa.parse("y - 1", ("x", "y"))
    assert pa.format_poly(pa.resultant(p, q, "y")) == "-x^2 + 1"


@pytest.mark.parametrize("name", pa.identity_names())
def test_identity_holds_exactly(name):
    rec = pa.verify_identity(name)
    assert rec.holds, rec.difference
    assert rec.difference == "0"


def test_identity_resultants_against_sympy():
    # independent route for the two resultants of the zeta gradient
    h, w = sp.symbols("h w")
    z = sp.sympify(pa.format_poly(pa.named_poly("zeta")).replace("^", "**"))
    zh, zw = sp.diff(z, h), sp.diff(z, w)
    chi1 = sp.sympify(pa.format_poly(pa.named_poly("chi1")).replace("^", "**"))
    chi2 = sp.sympify(pa.format_poly(pa.named_poly("chi2")).replace("^", "**"))
    assert sp.expand(sp.resultant(zh, zw, h) - (-1024) * (w - 3) ** 2 * (w - 2) * (w - 1) ** 2 * chi1) == 0
    assert sp.expand(sp.resultant(zh, zw, w) - (-6144) * h ** 2 * (h + 2) * (h + 4) ** 2 * chi2) == 0


def test_zeta_has_single_interior_critical_point():
    c = pa.zeta_critical_points()
    assert c.unique
    assert c.chi1_roots == 0 and c.chi2_roots == 0
    assert c.minimum == -16


def test_named_values_and_unknown_names():
    assert pa.named_value("l2", h=Fraction(-2)) == 2
    with pytest.raises(KeyError):
        pa.named_poly("nope")
    with pytest.raises(pa.PolynomialError):
        pa.named_value("zeta", h=1)
    assert "zeta" in pa.registered_names()
