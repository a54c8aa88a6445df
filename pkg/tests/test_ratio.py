from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triangle_cyclicity import ratio as rt

interior = st.floats(-3.99, -0.01)


@pytest.mark.parametrize("h", [-3.99, -3.2, -2.0, -0.7, -0.01, -1e-5])
def test_riccati_flow_matches_quadrature_ratio(h):
    assert rt.w_riccati(h) == pytest.approx(rt.w_direct(h), rel=1e-10)


def test_value_near_separatrix_is_frozen():
    # quadrature oracle (rel 4e-13 to the flow at this level)
    assert rt.w_riccati(-1e-6) == pytest.approx(2.6756342, abs=1e-7)
    assert rt.w_direct(-1e-6) == pytest.approx(2.6756342, abs=1e-7)


def test_center_limits():
    assert rt.w_riccati(-4.0 + 1e-6) - 1.0 == pytest.approx(1e-6 / 6, rel=1e-4)
    assert rt.w2_center_limit() == Fraction(1, 54)


@given(interior, st.floats(-10.0, 10.0))
def test_riccati_rhs_is_negative(h, w):
    assert rt.riccati_rhs(h, w) < 0


@given(interior)
@settings(max_examples=60, deadline=None)
def test_monotone_convex_and_enveloped(h):
    p = rt.ratio_point(h)
    assert p.w1 > 0 and p.w2 > 0 and p.w3 > 0
    env = rt.envelope_check(h, p.w)
    assert env.inside and env.lower_margin > 0 and env.upper_margin > 0


@pytest.mark.parametrize("h", [-3.5, -2.0, -0.5])
def test_closed_form_derivatives_match_finite_differences(h):
    s = 2e-3
    w = [rt.w_riccati(h + k * s) for k in (-2, -1, 0, 1, 2)]
    d1 = (w[0] - 8 * w[1] + 8 * w[3] - w[4]) / (12 * s)
    d2 = (-w[0] + 16 * w[1] - 30 * w[2] + 16 * w[3] - w[4]) / (12 * s * s)
    d3 = (-w[0] + 2 * w[1] - 2 * w[3] + w[4]) / (2 * s ** 3)
    p = rt.ratio_point(h)
    assert p.w1 == pytest.approx(d1, rel=1e-8)
    assert p.w2 == pytest.approx(d2, rel=1e-5)
    assert p.w3 == pytest.approx(d3, rel=1e-3)


def test_envelope_lines():
    assert rt.l1(-4.0) == 1.0 and rt.l2(-4.0) == 1.0
    assert rt.l2(0.0) == 3.0
    with pytest.raises(ValueError):
        rt.envelope_check(1.0, 2.0)


def test_array_evaluation_matches_scalar():
    hs = np.array([-3.9999, -2.5, -1e-31])
    vals = rt.w_riccati(hs)
    assert [rt.w_riccati(h) for h in hs] == pytest.approx(list(vals), rel=1e-15)
    assert vals[-1] < 3.0


def test_methods():
    with pytest.raises(ValueError):
        rt.ratio_point(-2.0, method="other")
    assert rt.ratio_point(-2.0, method="direct").w == pytest.approx(rt.ratio_point(-2.0).w, rel=1e-10)
