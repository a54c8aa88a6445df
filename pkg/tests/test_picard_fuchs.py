from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from triangle_cyclicity import picard_fuchs as pf
from triangle_cyclicity import quadrature as qd


def sympy_matrix(h):
    c = sp.Matrix(pf.M_CONST).applyfunc(sp.nsimplify)
    s = sp.Matrix(pf.M_SLOPE).applyfunc(sp.nsimplify)
    return c + h * s


def test_determinant_matches_symbolic():
    h = sp.symbols("h")
    det = sp.factor(sympy_matrix(h).det())
    assert sp.simplify(det - sp.Rational(9, 8) * h ** 2 * (h + 4)) == 0
    for q in (Fraction(-3, 2), Fraction(-7, 3), Fraction(-1, 5)):
        assert pf.pf_determinant(q) == Fraction(9, 8) * q ** 2 * (q + 4)


@pytest.mark.parametrize("h", [-3.9, -3.0, -2.0, -1.0, -0.1])
def test_quadrature_frames_satisfy_system(h):
    fr = qd.integral_frame(h)
    r = pf.pf_matrix(h) @ fr.derivatives - fr.values
    assert np.linalg.norm(r) / np.linalg.norm(fr.values) < 1e-11
    np.testing.assert_allclose(pf.pf_derivatives(fr.values, h), fr.derivatives, rtol=1e-10)


def test_pf_derivatives_singular_points():
    with pytest.raises(pf.PFSingularError):
        pf.pf_derivatives([1.0, 1.0, 1.0], 0.0)
    with pytest.raises(pf.PFSingularError):
        pf.pf_derivatives([1.0, 1.0, 1.0], -4.0)


@pytest.mark.parametrize("h", [-3.5, -2.0, -0.3])
def test_second_derivatives_match_finite_differences(h):
    s = 1e-4
    d_plus = qd.abelian_dI(h + s)
    d_minus = qd.abelian_dI(h - s)
    fd = [(a - b) / (2 * s) for a, b in zip(d_plus, d_minus)]  # I0'', I2'', I*''
    d0, d2, _ = qd.abelian_dI(h)
    dd2, dd0, dds = pf.second_derivatives(d2, d0, h)
    np.testing.assert_allclose([dd0, dd2, dds], fd, rtol=1e-6)


def test_center_series_against_undetermined_coefficients():
    # oracle: plug a polynomial ansatz into M(t - 4) u' = u and solve with sympy
    n = 7
    t = sp.symbols("t")
    a = sp.symbols(f"a0:{3 * (n + 2)}")
    u = sp.Matrix([sum(a[3 * k + i] * t ** k for k in range(n + 2)) for i in range(3)])
    eq = sympy_matrix(t - 4) * u.diff(t) - u
    eqs = [sp.expand(e).coeff(t, k) for e in eq for k in range(n + 1)]
    eqs += [a[3 * 1 + 2] - 1]  # I0'(-4) = 1
    eqs += [a[i] for i in range(3)]  # all integrals vanish at the centre
    sol = sp.solve(eqs, a, dict=True)[0]
    ours = pf.center_series_exact(n)
    for i, name in enumerate(("Istar", "I2", "I0")):
        for k in range(n):
            assert Fraction(str(sol[a[3 * k + i]])) == ours[name][k], (name, k)


def test_tabulated_center_series_is_consistent():
    ex = pf.center_series_exact(4)
    for name, coeffs in pf.CENTER_SERIES.items():
        assert ex[name] == coeffs


def test_center_slope_value():
    assert pf.center_slope() == pytest.approx(-np.pi / np.sqrt(3.0), rel=1e-10)


def test_series_seed_errors():
    with pytest.raises(pf.CapabilityError):
        pf.series_seed(-4, 5)
    with pytest.raises(pf.CapabilityError):
        pf.series_seed(0, 2)
    with pytest.raises(ValueError):
        pf.series_seed(1)


def test_separatrix_constant_fit():
    c, resid = pf.fit_separatrix_constant()
    assert c == pytest.approx(-2.8410656, abs=1e-6)
    assert resid < 1e-7
    seed = pf.series_seed(0, 1)
    got, want = seed.values(-1e-5), qd.integral_frame(-1e-5).values
    np.testing.assert_allclose(got[1:], want[1:], atol=1e-6)
    # I* carries only its h ln^2 term; the omitted h ln|h| part is ~1e-4 here
    assert abs(got[0] - want[0]) < 1e-3


@given(st.floats(-3.999, -1e-8))
@settings(max_examples=40, deadline=None)
def test_flow_satisfies_system(h):
    flow = pf.default_flow()
    assert flow.pf_residual(h)[0] < 1e-10


@pytest.mark.parametrize("h", [-3.9995, -3.7, -2.2, -0.9, -0.05, -1e-4])
def test_flow_matches_quadrature(flow, h):
    fr = qd.integral_frame(h)
    st_ = flow.state(h)
    np.testing.assert_allclose(st_[:3], fr.values, rtol=1e-9)
    np.testing.assert_allclose(st_[3:], fr.derivatives, rtol=1e-9)


def test_flow_rejects_out_of_range(flow):
    with pytest.raises(ValueError):
        flow.state(-4.0)
    with pytest.raises(ValueError):
        flow.state(-1e-31)


def test_pf_flow_between_levels():
    start = qd.integral_frame(-3.0)
    end = pf.pf_flow(-3.0, start, -1.0)
    np.testing.assert_allclose(end.values, qd.integral_frame(-1.0).values, rtol=1e-9)
