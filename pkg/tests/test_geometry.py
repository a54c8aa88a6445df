import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triangle_cyclicity import geometry as geo

levels = st.floats(min_value=-4.0, max_value=0.0, exclude_min=True, exclude_max=True)


def cubic_roots(h):
    # oracle: companion-matrix eigenvalues of x^3 - 6x^2 + 9x + h
    return np.sort(np.roots([1.0, -6.0, 9.0, h]).real)


def test_oval_at_minus_two_known_roots():
    e = geo.oval_extent(-2.0)
    # x(x-3)^2 = 2 has the roots 2 and 2 -/+ sqrt(3)
    assert e.x1 == pytest.approx(2.0 - np.sqrt(3.0), abs=1e-12)
    assert e.x2 == pytest.approx(2.0, abs=1e-12)
    assert e.x3 == pytest.approx(2.0 + np.sqrt(3.0), abs=1e-12)


@given(levels)
@settings(max_examples=200, deadline=None)
def test_extent_matches_companion_roots(h):
    e = geo.oval_extent(h)
    r = cubic_roots(h)
    assert 0.0 <= e.x1 < 1.0 < e.x2 <= 3.0 <= e.x3
    assert e.x1 == pytest.approx(r[0], abs=1e-7)
    assert e.x2 == pytest.approx(r[1], abs=1e-7)
    assert abs(geo.boundary_cubic(e.x1, h)) < 1e-13
    assert abs(geo.boundary_cubic(e.x2, h)) < 1e-13


@pytest.mark.parametrize("h", [-4.0, 0.0, 0.5, -5.0, float("nan")])
def test_levels_outside_interval_rejected(h):
    with pytest.raises(geo.DomainError):
        geo.oval_extent(h)


@given(st.floats(0.01, 0.98), st.floats(0.01, 0.98))
def test_chart_roundtrip_and_level_factor(x, y):
    x1, y1 = geo.to_h_chart(x, y)
    bx, by = geo.from_h_chart(x1, y1)
    assert bx == pytest.approx(x, abs=1e-14)
    assert by == pytest.approx(y, abs=1e-14)
    h00 = geo.triangle_hamiltonian(x, y)
    assert geo.oval_hamiltonian(x1, y1) == pytest.approx(float(geo.level_to_h_chart(h00)), abs=1e-12)


def test_chart_landmarks():
    # centre of the triangle sits at the centre of the oval family
    x1, y1 = geo.to_h_chart(*geo.CENTER_TRIANGLE)
    assert (float(x1), float(y1)) == pytest.approx(geo.CENTER_OVAL, abs=1e-15)
    # the saddle (3, 0) of the oval chart is the vertex (0, 0)
    assert tuple(map(float, geo.from_h_chart(3.0, 0.0))) == (0.0, 0.0)
    assert geo.triangle_hamiltonian(1 / 3, 1 / 3) * geo.LEVEL_FACTOR == pytest.approx(-4.0)


@given(levels, st.floats(0.0, 1.0))
@settings(deadline=None)
def test_oval_height_lies_on_level(h, t):
    e = geo.oval_extent(h)
    x = e.x1 + t * e.width
    y = geo.oval_height(h, x)
    assert y >= 0.0
    assert geo.oval_hamiltonian(x, y) == pytest.approx(h, abs=1e-10)
    assert geo.oval_height(h, x, branch=-1) == -y


def test_oval_height_outside_extent():
    with pytest.raises(geo.DomainError):
        geo.oval_height(-2.0, 2.5)
    with pytest.raises(ValueError):
        geo.oval_height(-2.0, 1.0, branch=0)
