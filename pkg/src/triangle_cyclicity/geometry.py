"""Ovals of the level sets x*(y^2 - (x-3)^2) = h and the triangle chart.

Two charts are used throughout the package:

* the *triangle chart* ``(x, y)`` with Hamiltonian ``xy(1 - x - y)``, whose
  period annulus fills the open triangle around the centre ``(1/3, 1/3)``;
* the *oval chart* ``(x1, y1)`` with Hamiltonian ``x1*(y1^2 - (x1-3)^2)``,
  centre ``(1, 0)`` at level -4 and the separatrix triangle at level 0.

The affine map between them multiplies levels by -108.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

H_CENTER = -4.0
H_SEPARATRIX = 0.0
LEVEL_FACTOR = -108.0
CENTER_TRIANGLE = (1.0 / 3.0, 1.0 / 3.0)
CENTER_OVAL = (1.0, 0.0)


class DomainError(ValueError):
    """Energy level or abscissa outside the admissible range."""


def check_level(h: float) -> float:
    h = float(h)
    if not (H_CENTER < h < H_SEPARATRIX):
        raise DomainError(f"energy level h={h!r} outside the open interval (-4, 0)")
    return h


def boundary_cubic(x, h):
    """p(x) = x*(x-3)^2 + h; the oval meets the x-axis at its roots."""
    return x * (x - 3.0) ** 2 + h


def oval_hamiltonian(x1, y1):
    return x1 * (y1 ** 2 - (x1 - 3.0) ** 2)


def triangle_hamiltonian(x, y):
    return x * y * (1.0 - x - y)


@dataclass(frozen=True)
class OvalExtent:
    """Abscissae where the oval at level ``h`` crosses the x-axis."""

    h: float
    x1: float
    x2: float

    @property
    def x3(self) -> float:
        """Third (exterior) root of the boundary cubic, always > 3."""
        return 6.0 - self.x1 - self.x2

    @property
    def width(self) -> float:
        return self.x2 - self.x1


def _root(h, lo, hi):
    x = brentq(boundary_cubic, lo, hi, args=(h,), xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    # one Newton polish; derivative vanishes only at the centre
    d = 3.0 * (x - 1.0) * (x - 3.0)
    if d != 0.0:
        xn = x - boundary_cubic(x, h) / d
        if lo < xn < hi and abs(boundary_cubic(xn, h)) < abs(boundary_cubic(x, h)):
            x = xn
    return x


def oval_extent(h: float) -> OvalExtent:
    """Left and right x-axis crossings of the oval at level ``h``.

    The boundary cubic is negative at 0 and 3 and positive at 1, so the two
    crossings are bracketed by (0, 1) and (1, 3).
    """
    h = check_level(h)
    return OvalExtent(h, _root(h, 0.0, 1.0), _root(h, 1.0, 3.0))


def oval_height(h: float, x: float, branch: int = 1) -> float:
    """Signed ordinate ``±sqrt((x-3)^2 + h/x)`` of the oval above/below ``x``."""
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    if h == H_CENTER and x == 1.0:
        return 0.0
    ext = oval_extent(h)
    if not (ext.x1 <= x <= ext.x2):
        raise DomainError(f"x={x!r} outside [{ext.x1}, {ext.x2}] for h={h}")
    if x == ext.x1 or x == ext.x2:
        return 0.0
    val = (x - 3.0) ** 2 + h / x
    return branch * np.sqrt(max(val, 0.0))


def to_h_chart(x, y):
    """Triangle chart ``(x, y)`` to oval chart ``(x1, y1)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 3.0 - 3.0 * (x + y), 3.0 * (x - y)


def from_h_chart(x1, y1):
    """Oval chart ``(x1, y1)`` to triangle chart ``(x, y)``."""
    x1 = np.asarray(x1, dtype=float)
    y1 = np.asarray(y1, dtype=float)
    return (3.0 - x1 + y1) / 6.0, (3.0 - x1 - y1) / 6.0


def level_to_h_chart(h00):
    """Triangle-chart level -> oval-chart level."""
    return LEVEL_FACTOR * np.asarray(h00, dtype=float)


def level_from_h_chart(h):
    return np.asarray(h, dtype=float) / LEVEL_FACTOR
