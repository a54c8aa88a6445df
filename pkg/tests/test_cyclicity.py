from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from triangle_cyclicity import cyclicity as cy
from triangle_cyclicity import quadrature as qd
from triangle_cyclicity.picard_fuchs import default_flow

finite = st.floats(-10.0, 10.0, allow_nan=False)


def test_chart_matrix_inverse_is_exact():
    inv = sp.Matrix(cy.L_MATRIX).inv()
    assert [[Fraction(str(inv[i, j])) for j in range(4)] for i in range(4)] == [list(r) for r in cy.L_INVERSE]


@given(st.tuples(finite, finite, finite, finite))
def test_mu_greek_roundtrip(mu):
    p = cy.PerturbationParams.from_mu(mu)
    q = cy.PerturbationParams.from_greek(p.greek)
    np.testing.assert_allclose(q.mu_array, mu, atol=1e-9 * (1 + np.abs(mu).max()))


def test_mu_from_eps_exact():
    e = tuple(Fraction(k, 7) for k in (1, 2, -3, 4, 5))
    e0, e1, e2, e3, e4 = e
    p = e1 * e3 - e2 * e4
    assert cy.mu_from_eps(e) == (-e0, -(e1 * e3 + e2 * e4) / 2, p * (e3 - e4) / 2, p * (e1 + e2) / 6)
    assert cy.convert_params("eps", e).eps == e
    with pytest.raises(ValueError):
        cy.convert_params("zeta", e)


@pytest.mark.parametrize("h", [-3.8, -2.0, -0.6])
def test_reductions_match_defining_integrals(h):
    red = cy.reduced_J(qd.integral_frame(h))
    direct = [qd.original_J(k, h) for k in (1, 2, 3, 4)]
    np.testing.assert_allclose(red, direct, rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("h", [-3.95, -2.5, -1.0, -1e-3])
def test_greek_form_matches_reductions(rng, h):
    for _ in range(5):
        p = cy.PerturbationParams.from_mu(tuple(rng.standard_normal(4)))
        a = cy.J_eval(h, p)
        b = cy.J_from_reductions(h, p)
        c = cy.J_eval(h, p, method="quadrature")
        scale = np.abs(p.mu_array).max()
        assert a == pytest.approx(b, rel=1e-9, abs=1e-11 * scale)
        assert a == pytest.approx(c, rel=1e-9, abs=1e-11 * scale)


def test_derivative_identity(rng):
    # J' 7776 h (h+4) = f I0', with J' from central differences of quadrature values
    for _ in range(3):
        p = cy.PerturbationParams.from_greek(tuple(rng.standard_normal(4)))
        for h in np.linspace(-3.8, -0.2, 7):
            s = 1e-4
            dj = (cy.J_eval(h + s, p, "quadrature") - cy.J_eval(h - s, p, "quadrature")) / (2 * s)
            rhs = float(cy.f_eval(h, p)) * qd.abelian_dI(h)[0]
            assert dj * 7776 * h * (h + 4) == pytest.approx(rhs, rel=1e-6, abs=1e-6)


def test_endpoint_values_of_f_and_J(rng):
    g = tuple(rng.standard_normal(4))
    lam, _, gam, kap = g
    np.testing.assert_allclose(cy.f_basis(0.0, 3.0), [-16.0, 0.0, -96.0, 0.0])
    assert cy.f_separatrix_value(g) == pytest.approx(-16 * (lam + 6 * gam))
    assert cy.J_eval(-4 + 1e-8, g) == pytest.approx(cy.J_center_value(g), abs=1e-7)
    s = 1e-6
    fd = (cy.f_eval(-4 + 2 * s, g) - cy.f_eval(-4 + s, g)) / s
    assert fd == pytest.approx(cy.f_center_slope(g), rel=1e-4)


def test_rho_limit():
    assert cy.rho_center_limit(0) == Fraction(1, 54) / (6 * Fraction(7, 5832)) - Fraction(4, 3)
    assert float(cy.rho_eval(-4 + 1e-4, 0.0)) == pytest.approx(float(cy.rho_center_limit(0)), abs=1e-3)


def brute_force_zeros(params, n=6000):
    # oracle: sign changes on a dense graded grid, refined by bisection
    flow = default_flow()
    t = np.concatenate([-4 + np.geomspace(1e-7, 0.05, n // 3), np.linspace(-3.95, -0.05, n // 3),
                        -np.geomspace(0.05, 1e-25, n // 3)])
    t = np.unique(t)
    g = np.array(params.greek_array)
    st_ = flow.state(t)
    J = g @ cy.j_basis(t, st_[3], st_[4], st_[5])
    idx = np.flatnonzero(np.sign(J[:-1]) * np.sign(J[1:]) < 0)
    out = []
    for i in idx:
        a, b = t[i], t[i + 1]
        fa = cy.J_eval(a, params)
        for _ in range(60):
            m = 0.5 * (a + b)
            fm = cy.J_eval(m, params)
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        out.append(0.5 * (a + b))
    return out


def test_count_matches_brute_force(rng):
    for _ in range(25):
        p = cy.PerturbationParams.from_greek(tuple(rng.standard_normal(4)))
        rep = cy.count_zeros(p)
        oracle = brute_force_zeros(p)
        assert rep.count == len(oracle), (p.greek, rep.count, oracle)
        np.testing.assert_allclose([z.location for z in rep.zeros], oracle, atol=1e-7)
        assert rep.parity_ok


def test_cli_example_and_degenerate():
    rep = cy.count_zeros((0, -144, 0, 0))
    assert rep.count == 0  # J = J1 = 2 I0 / 27 < 0
    with pytest.raises(cy.DegenerateParamsError):
        cy.count_zeros((0, 0, 0, 0))


def test_three_zero_construction():
    tz = cy.find_three_zeros((-3.98, -3.95, -3.9))
    locs = [z.location for z in tz.report.zeros]
    np.testing.assert_allclose(locs, tz.targets, atol=1e-6)
    for h in tz.targets:
        assert abs(cy.J_eval(h, tz.params, method="quadrature")) < 1e-10
    assert [z.direction for z in tz.report.zeros] == [-1, 1, -1] or [z.direction for z in tz.report.zeros] == [1, -1, 1]
    with pytest.raises(ValueError):
        cy.find_three_zeros((-3.9, -3.95, -3.98))
    with pytest.raises(cy.WindowTooLargeError):
        cy.find_three_zeros((-3.98, -3.95, -3.9), window=-3.92)


def test_wronskian_low_orders_by_finite_differences():
    flow = default_flow()
    js = lambda h: cy.reduced_J(flow.frame(h))
    for h in (-3.5, -2.0, -0.8):
        s = 1e-4
        d = (js(h + s) - js(h - s)) / (2 * s)
        v = js(h)
        r = cy.ect_determinants(h)
        assert r.deltas[0] == pytest.approx(v[0], rel=1e-10)
        assert r.deltas[1] == pytest.approx(v[0] * d[1] - v[1] * d[0], rel=1e-6)


def test_wronskian_limit_at_center():
    a0 = default_flow().scale
    r = cy.ect_determinants(-4 + 1e-3)
    assert r.deltas[3] == pytest.approx(-a0 ** 4 / 6377292, rel=1e-2)


def test_stratum_classification():
    assert cy.classify_stratum((1.0, 2.0, 3.0, 0.0)) == "kappa0"
    assert cy.classify_stratum((0.0, 0.0, 1.0, 1.0)) == "kappa1_gamma_nonneg"
    assert cy.classify_stratum((0.0, 0.0, -4.0, 1.0)) == "kappa1_gamma_le_-26/7"
    assert cy.classify_stratum((0.0, 0.0, -1.0, 1.0)) == "kappa1_gamma_mid_f0_nonneg"
    assert cy.classify_stratum((10.0, 0.0, -1.0, 1.0)) == "kappa1_gamma_mid_f0_neg"
    # strata are defined after scaling kappa to 1, so the sign of kappa drops out
    assert cy.classify_stratum((0.0, 0.0, 1.0, -1.0)) == cy.classify_stratum((0.0, 0.0, -1.0, 1.0))


def test_scan_is_order_independent():
    a = cy.scan(240, seed=7, chunk_size=40, jobs=1).as_dict()
    b = cy.scan(240, seed=7, chunk_size=40, jobs=2).as_dict()
    assert a == b
    assert a["global_max"] <= 3
    assert cy.scan(240, seed=8, chunk_size=40).as_dict() != a
