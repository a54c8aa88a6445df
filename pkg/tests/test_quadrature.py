import numpy as np
import pytest

from triangle_cyclicity import quadrature as qd
from triangle_cyclicity.geometry import DomainError, oval_extent

# (I*, I2, I0, I*', I2', I0') from 30-digit tanh-sinh quadrature (mpmath) of the
# defining integrals over [x1, x2]; independent of the package's scipy route
ORACLE = {
    -3.5: (-0.039855846875224571619, -0.95939853840955503894, -0.92011960203453059625,
           -0.16387349175651308908, -2.0283134972693569652, -1.8680160250246935253),
    -2.0: (-0.77853928431010865666, -4.6064189407070995172, -3.8806643388446858024,
           -0.9042851374598408931, -2.9129915363614674899, -2.1032731579881813424),
    -0.5: (-3.3624343343321386614, -10.223491002109038872, -7.3939714857688053572,
           -3.1337599790274627367, -5.0434720894743852979, -2.7302288186899347738),
}


@pytest.mark.parametrize("h", sorted(ORACLE))
def test_frame_matches_high_precision_oracle(h):
    fr = qd.integral_frame(h)
    got = (fr.Istar, fr.I2, fr.I0, fr.dIstar, fr.dI2, fr.dI0)
    np.testing.assert_allclose(got, ORACLE[h], rtol=1e-12)


def test_I0_is_minus_enclosed_area():
    # area of the oval by a crude but independent route: midpoint rule on the height
    h = -2.0
    e = oval_extent(h)
    n = 200_000
    xs = e.x1 + (np.arange(n) + 0.5) * e.width / n
    area = 2.0 * np.sum(np.sqrt(np.maximum((xs - 3.0) ** 2 + h / xs, 0.0))) * e.width / n
    assert qd.abelian_I(0, h) == pytest.approx(-area, rel=1e-6)


@pytest.mark.parametrize("i", [-1, 0, 1, 2, 3, 6])
def test_derivative_matches_finite_difference(i):
    h, s = -1.7, 1e-4
    fd = (qd.abelian_I(i, h + s) - qd.abelian_I(i, h - s)) / (2 * s)
    assert qd.abelian_dI_k(i, h) == pytest.approx(fd, rel=1e-7)


def test_even_powers_of_y_vanish_and_j1_is_I():
    assert qd.abelian_Iij(2, 2, -1.0) == 0.0
    assert qd.abelian_Iij(3, 1, -1.0) == pytest.approx(qd.abelian_I(3, -1.0), rel=1e-13)


def test_bad_arguments():
    with pytest.raises(ValueError):
        qd.abelian_I(7, -1.0)
    with pytest.raises(DomainError):
        qd.abelian_I(0, 0.0)
    with pytest.raises(ValueError):
        qd.original_J(5, -1.0)
    with pytest.raises(ValueError):
        qd.original_J(2, -1.0, form="line")


@pytest.mark.parametrize("h", [-3.6, -2.0, -0.4])
@pytest.mark.parametrize("k", [1, 4])
def test_area_and_line_forms_agree(h, k):
    a = qd.original_J(k, h, form="area")
    b = qd.original_J(k, h, form="line")
    assert a == pytest.approx(b, rel=1e-8, abs=1e-13)


def test_separatrix_limits():
    fr = qd.integral_frame(-1e-6)
    assert fr.I0 == pytest.approx(-9.0, abs=1e-4)
    assert fr.I2 == pytest.approx(-13.5, abs=1e-4)
    assert fr.Istar == pytest.approx(-6.0, abs=1e-4)


def test_center_slope_is_minus_pi_over_root3():
    # I0 ~ a0 (h + 4): near the centre the oval is an ellipse of area pi (h+4)/sqrt(3)
    h = -4.0 + 1e-6
    assert qd.abelian_I(0, h) / 1e-6 == pytest.approx(-np.pi / np.sqrt(3.0), rel=1e-5)
