import csv

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from triangle_cyclicity import cyclicity as cy
from triangle_cyclicity import quadrature as qd
from triangle_cyclicity import simulate as sm

small = st.floats(-0.05, 0.05)


def test_unperturbed_orbit_closes():
    r = sm.poincare_return(-2.0, sm.EpsVector())
    assert r.displacement == 0.0
    assert r.closure <= 1e-8
    assert abs(r.direct_difference) <= 1e-12
    assert r.period > 0


@given(st.floats(0.02, 0.6), st.floats(0.02, 0.6), st.tuples(small, small, small, small, small))
@settings(max_examples=50, deadline=None)
def test_energy_rate_is_derivative_of_H(x, y, e):
    X, Y = sp.symbols("x y")
    H = X * Y * (1 - X - Y)
    eps = sm.EpsVector(*e)
    dx, dy = sm.vector_field(X, Y, eps)
    rate = sp.diff(H, X) * dx + sp.diff(H, Y) * dy
    want = float(rate.subs({X: x, Y: y}))
    assert sm.energy_rate(x, y, eps) == pytest.approx(want, rel=1e-10, abs=1e-15)


def test_integrated_and_pointwise_displacement_agree():
    eps = sm.EpsVector(2e-3, 1e-3, -1e-3, 1e-3, 5e-4)
    r = sm.poincare_return(-1.5, eps)
    assert r.displacement == pytest.approx(r.direct_difference, rel=1e-7, abs=1e-15)


def test_section_point_level():
    for h in (-3.9, -2.0, -0.1):
        p = sm.section_point(h)
        assert 0 < p.s < 1 / 3
        assert p.h == pytest.approx(h, rel=1e-13)


def test_pure_eps0_has_no_cycles():
    cc = sm.count_cycles(sm.EpsVector(1e-3), n_section=12)
    assert cc.count == 0
    d = np.array(cc.displacements)
    assert np.all(d < 0) or np.all(d > 0)
    # measured leading part is -mu1 J1 with mu1 = -eps0, i.e. eps0 J1
    h = -2.0
    assert sm.displacement(h, sm.EpsVector(1e-5)) / 1e-5 == pytest.approx(qd.original_J(1, h), rel=1e-3)


def test_eps_from_mu_examples():
    e = sm.eps_from_mu((-1.0, 0.0, 0.0, 0.0), 1e-3)
    assert e.values == pytest.approx((1e-3, 0.0, 0.0, 0.0, 0.0), abs=1e-18)
    z = sm.eps_from_mu((0.0, 0.0, 0.0, 0.0), 1e-3)
    assert z.values == (0.0,) * 5
    with pytest.raises(sm.GaugeError):
        sm.eps_from_mu((0.0, 0.0, 1.0, 0.0), 1e-3)
    with pytest.raises(ValueError):
        sm.EpsVector(0.5)


@given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.05, 1)),
       st.sampled_from([1e-2, 1e-3]))
@settings(max_examples=80, deadline=None)
def test_eps_from_mu_reaches_direction(mu, delta):
    try:
        e = sm.eps_from_mu(mu, delta)
    except sm.GaugeError:
        return
    assert max(abs(v) for v in e.values) == pytest.approx(delta, rel=1e-9)
    assert sm.direction_cosine(e.mu, mu) >= 1 - 1e-12


def test_three_zero_direction_is_reachable():
    tz = cy.find_three_zeros((-3.5, -2.5, -1.5))
    e = sm.eps_from_mu(tz.params.mu_array, 1e-3)
    assert sm.direction_cosine(e.mu, tz.params.mu_array) >= 1 - 1e-12


def test_orbit_samples_stay_on_level(tmp_path):
    rows = sm.orbit_samples(-2.0, sm.EpsVector(), n=50)
    assert rows.shape == (50, 4)
    np.testing.assert_allclose(rows[:, 3], rows[0, 3], rtol=1e-10)
    path = tmp_path / "orbit.csv"
    sm.write_csv(path, ["t", "x", "y", "H"], rows)
    with open(path) as fh:
        lines = list(csv.reader(fh))
    assert lines[0] == ["t", "x", "y", "H"]
    assert len(lines) == 51 and "e" in lines[1][1]
    assert float(lines[1][1]) == rows[0, 1]


def test_measured_basis_first_columns():
    # orbit-measured leading coefficients of mu1, mu2, mu3 against the abelian integrals
    levels = np.array([-3.5, -2.0, -1.0])
    M = sm.measured_principal_basis(levels)
    for i, h in enumerate(levels):
        J = [qd.original_J(k, h) for k in (1, 2, 3)]
        assert M[i, 0] == pytest.approx(-J[0], rel=1e-6)
        assert M[i, 1] == pytest.approx(J[1], rel=1e-4)
        assert M[i, 2] == pytest.approx(J[2] / 2, rel=1e-2)
