"""Direct quadrature of the Abelian integrals over the ovals.

On the oval at level ``h`` write ``Y(x) = sqrt((x-3)^2 + h/x)``.  With the
counter-clockwise orientation

    I_i(h)     = -2 * int_{x1}^{x2} x^i Y dx
    I_*(h)     = -2 * int_{x1}^{x2} (x-1) ln(x) Y dx
    I_i'(h)    = -int_{x1}^{x2} x^(i-1) / Y dx
    I_*'(h)    = -int_{x1}^{x2} (x-1) ln(x) / (x Y) dx

Since ``x*Y^2 = (x-x1)(x2-x)(x3-x)`` with ``x3 > 3``, the substitution
``x = x1 + (x2-x1) sin^2(t)`` removes both square-root endpoint singularities
and leaves smooth integrands on ``[0, pi/2]``.

``original_J`` evaluates the displacement integrals from their definitions in
the triangle chart, either as area integrals over ``{xy(1-x-y) >= -h/108}`` or
as line integrals over its boundary.  The area form of the fourth integral has
a ``(x-y)^-2`` singularity across the diagonal and is taken as a Hadamard
finite part, which is the value the (regular) line form produces.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq

from .geometry import OvalExtent, check_level, from_h_chart, oval_extent

DEFAULT_RTOL = 1e-12
AREA_RTOL = 1e-10


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, value=None, abserr=None, requested=None):
        super().__init__(message)
        self.value = value
        self.abserr = abserr
        self.requested = requested


def _quad(f, a, b, rtol, points=None, limit=400, accept=1e3):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, a, b, epsabs=0.0, epsrel=rtol, limit=limit, points=points)
    if not np.isfinite(val) or err > accept * rtol * max(abs(val), 1e-300):
        raise QuadratureError(
            f"quadrature on [{a}, {b}] reached abserr={err:.3g} for value {val:.17g}",
            value=val, abserr=err, requested=rtol,
        )
    return val


def _breakpoints(ext: OvalExtent):
    """Angles where the integrand varies on the scale of x1 or x3 - x2."""
    w = ext.width
    pts = []
    for scale in (ext.x1, ext.x3 - ext.x2):
        for k in (1.0, 10.0, 100.0):
            r = k * scale / w
            if r < 0.5:
                pts.append(np.arcsin(np.sqrt(r)))
                pts.append(np.arccos(np.sqrt(r)))
    pts = sorted(p for p in set(pts) if 1e-12 < p < np.pi / 2 - 1e-12)
    return pts or None


def _oval_integral(h, g, kind, rtol):
    """int_{x1}^{x2} g(x) Y dx  (kind='y')  or  int g(x)/Y dx  (kind='inv')."""
    ext = oval_extent(h)
    x1, x3, w = ext.x1, ext.x3, ext.width

    if kind == "y":
        def f(t):
            s, c = np.sin(t), np.cos(t)
            x = x1 + w * s * s
            return 2.0 * g(x) * (w * s * c) ** 2 * np.sqrt((x3 - x) / x)
    elif kind == "inv":
        def f(t):
            s = np.sin(t)
            x = x1 + w * s * s
            return 2.0 * g(x) * np.sqrt(x / (x3 - x))
    else:
        raise ValueError(kind)
    return _quad(f, 0.0, np.pi / 2, rtol, points=_breakpoints(ext))


def _power(i):
    return lambda x: x ** i


def _log_weight(x):
    return (x - 1.0) * np.log(x)


def abelian_I(i: int, h: float, rtol: float = DEFAULT_RTOL) -> float:
    """I_i(h) = closed integral of x^i y dx over the oval, for -1 <= i <= 6."""
    h = check_level(h)
    if not (-1 <= int(i) <= 6):
        raise ValueError(f"index i={i} outside -1..6")
    return -2.0 * _oval_integral(h, _power(int(i)), "y", rtol)


def abelian_Istar(h: float, rtol: float = DEFAULT_RTOL) -> float:
    """I_*(h) = closed integral of y (x-1) ln(x) dx over the oval."""
    h = check_level(h)
    return -2.0 * _oval_integral(h, _log_weight, "y", rtol)


def abelian_Iij(i: int, j: int, h: float, rtol: float = DEFAULT_RTOL) -> float:
    """I_ij(h) = closed integral of x^i y^j dx (zero for even j)."""
    h = check_level(h)
    if j < 0:
        raise ValueError("j must be non-negative")
    if j % 2 == 0:
        return 0.0
    # Y^j = Y * (p(x)/x)^((j-1)/2)
    m = (j - 1) // 2
    return -2.0 * _oval_integral(
        h, lambda x: x ** i * ((x * (x - 3.0) ** 2 + h) / x) ** m, "y", rtol
    )


def abelian_dI_k(i: int, h: float, rtol: float = DEFAULT_RTOL) -> float:
    """h-derivative of I_i: -int x^(i-1)/Y dx."""
    h = check_level(h)
    return -_oval_integral(h, _power(int(i) - 1), "inv", rtol)


def abelian_dI(h: float, rtol: float = DEFAULT_RTOL):
    """(I_0', I_2', I_*') at level ``h``."""
    h = check_level(h)
    d0 = -_oval_integral(h, _power(-1), "inv", rtol)
    d2 = -_oval_integral(h, _power(1), "inv", rtol)
    ds = -_oval_integral(h, lambda x: _log_weight(x) / x, "inv", rtol)
    return d0, d2, ds


@dataclass(frozen=True)
class IntegralFrame:
    """Values and h-derivatives of (I_*, I_2, I_0) at one level."""

    h: float
    Istar: float
    I2: float
    I0: float
    dIstar: float
    dI2: float
    dI0: float

    @property
    def values(self) -> np.ndarray:
        return np.array([self.Istar, self.I2, self.I0])

    @property
    def derivatives(self) -> np.ndarray:
        return np.array([self.dIstar, self.dI2, self.dI0])

    @property
    def ratio(self) -> float:
        return self.dI2 / self.dI0


def integral_frame(h: float, rtol: float = DEFAULT_RTOL) -> IntegralFrame:
    h = check_level(h)
    d0, d2, ds = abelian_dI(h, rtol)
    return IntegralFrame(
        h=h,
        Istar=abelian_Istar(h, rtol),
        I2=abelian_I(2, h, rtol),
        I0=abelian_I(0, h, rtol),
        dIstar=ds, dI2=d2, dI0=d0,
    )


# integrals in the triangle chart ------------------------------------------------


def _diagonal_extent(h00):
    """Range of v = x + y over the region xy(1-x-y) >= h00."""
    g = lambda v: v * v * (1.0 - v) - 4.0 * h00
    return (brentq(g, 0.0, 2.0 / 3.0, xtol=1e-300, rtol=4 * np.finfo(float).eps),
            brentq(g, 2.0 / 3.0, 1.0, xtol=1e-300, rtol=4 * np.finfo(float).eps))


def _area(h00, inner, rtol):
    """Area integral with v = x+y outer, u = x-y inner; dx^dy = du dv / 2."""
    va, vb = _diagonal_extent(h00)
    w = vb - va

    def outer(t):
        s, c = np.sin(t), np.cos(t)
        v = va + w * s * s
        half = np.sqrt(max(v * v - 4.0 * h00 / (1.0 - v), 0.0))
        return 0.5 * inner(v, half) * 2.0 * w * s * c

    return _quad(outer, 0.0, np.pi / 2, rtol, limit=200)


def _slice(fun, rtol):
    def inner(v, half):
        if half == 0.0:
            return 0.0

        def g(t):
            u = half * np.sin(t)
            return fun(0.5 * (v + u), 0.5 * (v - u)) * half * np.cos(t)

        return _quad(g, -np.pi / 2, np.pi / 2, rtol, limit=100)

    return inner


def _finite_part_slice(rtol):
    # slice of 3x^2y^2 + 2x^3y^3/(x-y)^2 with x y = (v^2-u^2)/4
    def inner(v, half):
        if half == 0.0:
            return 0.0
        a = half
        regular = 3.0 / 16.0 * (2 * v ** 4 * a - 4 * v * v * a ** 3 / 3 + 2 * a ** 5 / 5)
        # finite part of int_{-a}^{a} (v^2-u^2)^3 / (32 u^2) du
        smooth = 2.0 * (-3 * v ** 4 * a + v * v * a ** 3 - a ** 5 / 5) / 32.0
        return regular + smooth - 2.0 * v ** 6 / 32.0 / a

    return inner


def _integrands():
    return {
        1: lambda x, y: -2.0 * (x + y),
        2: lambda x, y: (x ** 3 + y ** 3) / (x * y),
        3: lambda x, y: ((x - y) * (x + y) ** 2 * np.log(x / y) + (x + y) * (x * x + x * y + y * y)) / (x * y),
    }


def _line(h, omega, rtol):
    """Closed integral over the oval (counter-clockwise), parametrised in the oval chart.

    ``omega(x, y, dx, dy, x1, y1, dx1)`` returns the integrand per unit angle.
    """
    ext = oval_extent(h)
    m, r, x3 = 0.5 * (ext.x1 + ext.x2), 0.5 * ext.width, ext.x3

    def f(phi):
        c, s = np.cos(phi), np.sin(phi)
        x1 = m + r * c
        sq = np.sqrt((x3 - x1) / x1)
        y1 = r * s * sq
        dx1 = -r * s
        dsq = -x3 / (2.0 * sq * x1 * x1) * dx1
        dy1 = r * c * sq + r * s * dsq
        x, y = from_h_chart(x1, y1)
        dx, dy = (-dx1 + dy1) / 6.0, (-dx1 - dy1) / 6.0
        return omega(float(x), float(y), dx, dy, x1, y1, dx1)

    return _quad(f, 0.0, 2.0 * np.pi, rtol, limit=200)


def original_J(k: int, h: float, form: str = "area", rtol: float | None = None) -> float:
    """J_k from its defining integral in the triangle chart at oval level ``h``.

    ``form`` is ``"area"`` (all k; finite part for k = 4) or ``"line"``
    (k = 1 and k = 4 only, the two integrals given as boundary integrals).
    """
    h = check_level(h)
    h00 = -h / 108.0
    if form == "area":
        rtol = AREA_RTOL if rtol is None else rtol
        if k in (1, 2, 3):
            return _area(h00, _slice(_integrands()[k], rtol * 1e-2), rtol)
        if k == 4:
            return _area(h00, _finite_part_slice(rtol), rtol) / (3.0 * h00)
        raise ValueError(f"k={k} not in 1..4")
    if form == "line":
        rtol = DEFAULT_RTOL if rtol is None else rtol
        if k == 1:
            return _line(h, lambda x, y, dx, dy, *_: y * y * dx - x * x * dy, rtol)
        if k == 4:
            return _line_ratio(h, rtol) / (3.0 * h00)
        raise ValueError("line form available for k = 1 and k = 4")
    raise ValueError(f"unknown form {form!r}")


def _line_ratio(h, rtol):
    # x^3 y^3 (dx+dy)/(y-x) = x^3 y^3 dx1/y1 and dx1/y1 = -dphi/sqrt((x3-x1)/x1),
    # so the integrand is smooth through the diagonal crossings
    ext = oval_extent(h)
    m, r, x3 = 0.5 * (ext.x1 + ext.x2), 0.5 * ext.width, ext.x3

    def f(phi):
        c, s = np.cos(phi), np.sin(phi)
        x1 = m + r * c
        sq = np.sqrt((x3 - x1) / x1)
        y1 = r * s * sq
        x, y = (3.0 - x1 + y1) / 6.0, (3.0 - x1 - y1) / 6.0
        return -(x * y) ** 3 / sq

    return _quad(f, 0.0, 2.0 * np.pi, rtol, limit=200)
