"""The ratio w(h) = I_2'(h) / I_0'(h).

``w`` solves the Riccati equation

    3h(h+4) w' = -2w^2 + 2(h+6)w - 2(2h+9),

rises from w(-4) = 1 to w(0) = 3 and stays between the tangent line
``l1(h) = 1 + (h+4)/6`` and the chord ``l2(h) = 3 + h/2``.  The closed forms
of w', w'', w''' below treat (h, w) as independent variables; they are the
true derivatives only along w = w(h).

Near 0 the equation is integrated in ``s = ln|h|``, where it reads
``dw/ds = A(h, w) / (3(h+4))`` and is regular: w approaches 3 like
``3 + 6/(ln|h| + K)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import check_level
from .picard_fuchs import IntegrationError
from .polyalg import named_poly
from .quadrature import abelian_dI

# w = sum c_k (h+4)^k near the centre
CENTER_RATIO = (Fraction(1), Fraction(1, 6), Fraction(1, 108), Fraction(7, 5832))

SEED_OFFSET = 1e-3
H_STOP = 1e-30
RICCATI_RTOL = 1e-12


def l1(h):
    """Tangent line to w at the centre level."""
    return 1.0 + (np.asarray(h, dtype=float) + 4.0) / 6.0


def l2(h):
    """Chord through (-4, 1) and (0, 3)."""
    return 3.0 + np.asarray(h, dtype=float) / 2.0


def riccati_rhs(h, w):
    """-2w^2 + 2(h+6)w - 2(2h+9); negative for every real w when -4 < h < 0."""
    return -2.0 * w * w + 2.0 * (h + 6.0) * w - 2.0 * (2.0 * h + 9.0)


def w_direct(h: float) -> float:
    """w from quadrature of I_2' and I_0'."""
    d0, d2, _ = abelian_dI(check_level(h))
    return d2 / d0


def center_ratio(h) -> float:
    t = float(h) + 4.0
    return sum(float(c) * t ** k for k, c in enumerate(CENTER_RATIO))


class RiccatiSolution:
    """Dense solution of the Riccati equation on (-4, 0).

    Seeded from the centre expansion at ``-4 + delta`` and integrated in
    ``s = ln|h|`` down to ``|h| = h_stop``; closer to 0 the continuation
    ``3 + 6/(ln|h| + K)`` with K matched at ``h_stop`` is used.
    """

    def __init__(self, delta: float = SEED_OFFSET, h_stop: float = H_STOP, rtol: float = RICCATI_RTOL):
        self.delta, self.h_stop, self.rtol = delta, h_stop, rtol
        s0, s1 = np.log(4.0 - delta), np.log(h_stop)

        def rhs(s, w):
            h = -np.exp(s)
            return riccati_rhs(h, w) / (3.0 * (h + 4.0))

        def blowup(s, w):
            return (w[0] - 1.0) * (3.0 - w[0]) + 1e-3
        blowup.terminal = True

        sol = solve_ivp(rhs, (s0, s1), [center_ratio(-4.0 + delta)], method="DOP853",
                        rtol=rtol, atol=1e-15, dense_output=True, events=blowup)
        if sol.status != 0:
            where = -np.exp(sol.t[-1])
            raise IntegrationError(f"Riccati flow left (1, 3) near h={where:.6g}", location=where)
        self._sol = sol
        w_end = float(sol.y[0, -1])
        self.K = 6.0 / (w_end - 3.0) - s1

    def __call__(self, h):
        h_arr = np.atleast_1d(np.asarray(h, dtype=float))
        if np.any((h_arr <= -4.0) | (h_arr >= 0.0)):
            raise ValueError("levels must lie in (-4, 0)")
        out = np.empty_like(h_arr)
        near = h_arr < -4.0 + self.delta
        tail = h_arr > -self.h_stop
        mid = ~(near | tail)
        if np.any(near):
            out[near] = [center_ratio(x) for x in h_arr[near]]
        if np.any(mid):
            out[mid] = self._sol.sol(np.log(-h_arr[mid]))[0]
        if np.any(tail):
            out[tail] = 3.0 + 6.0 / (np.log(-h_arr[tail]) + self.K)
        return float(out[0]) if np.ndim(h) == 0 else out


@lru_cache(maxsize=4)
def riccati_solution(delta: float = SEED_OFFSET, h_stop: float = H_STOP) -> RiccatiSolution:
    return RiccatiSolution(delta, h_stop)


def w_riccati(h):
    """w(h) from the Riccati flow (scalar or array)."""
    return riccati_solution()(h)


@lru_cache(maxsize=None)
def _numeric(name):
    return named_poly(name).numeric()


def zeta(h, w):
    return _numeric("zeta")(h, w)


def w_derivs(h, w):
    """Closed-form (w', w'', w''') at the point (h, w)."""
    h = np.asarray(h, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any((h <= -4.0) | (h >= 0.0)):
        raise ValueError("levels must lie in (-4, 0)")
    q = h * (h + 4.0)
    w1 = riccati_rhs(h, w) / (3.0 * q)
    w2 = _numeric("w2_num")(h, w) / (9.0 * q * q)
    w3 = 4.0 * zeta(h, w) / (27.0 * q ** 3)
    return w1, w2, w3


def w2_center_limit() -> Fraction:
    """w''(-4) read off the centre expansion."""
    return 2 * CENTER_RATIO[2]


@dataclass(frozen=True)
class RatioPoint:
    h: float
    w: float
    w1: float
    w2: float
    w3: float


def ratio_point(h: float, method: str = "riccati") -> RatioPoint:
    h = check_level(h)
    if method == "riccati":
        w = w_riccati(h)
    elif method == "direct":
        w = w_direct(h)
    else:
        raise ValueError(f"unknown method {method!r}")
    w1, w2, w3 = w_derivs(h, w)
    return RatioPoint(h, float(w), float(w1), float(w2), float(w3))


@dataclass(frozen=True)
class EnvelopeResult:
    inside: bool
    lower_margin: float  # w - l1(h)
    upper_margin: float  # l2(h) - w


def envelope_check(h: float, w: float, tol: float = 0.0) -> EnvelopeResult:
    """Whether ``l1(h) <= w <= l2(h)``; margins are positive strictly inside."""
    h = float(h)
    if not (-4.0 <= h <= 0.0):
        raise ValueError(f"h={h} outside [-4, 0]")
    lo = float(w - l1(h))
    hi = float(l2(h) - w)
    return EnvelopeResult(lo >= -tol and hi >= -tol, lo, hi)
