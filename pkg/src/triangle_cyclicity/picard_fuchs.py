"""Picard-Fuchs system for (I_*, I_2, I_0) and its series solutions.

The vector ``u = (I_*, I_2, I_0)`` satisfies ``M(h) u' = u`` with

    M(h) = [[h, -2,          h + 6      ],
            [0, 3(h - 6)/4,  3(h + 9)/2 ],
            [0, -3,          3(h + 6)/2 ]],

``det M = 9/8 h^2 (h + 4)``.  The system is singular at the centre level -4
and at the separatrix level 0.  Near -4 the integrals are analytic and their
Taylor coefficients (all proportional to ``I_0'(-4)``) follow from a
Frobenius-type recursion, computed here exactly in rationals.

Numerical integration of the system (``pf_flow`` / ``PicardFuchsFlow``)
starts from the printed degree-4 expansion at ``-4 + delta``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .geometry import check_level
from .quadrature import IntegralFrame, abelian_dI, abelian_I

F = Fraction

# M(h) = M_CONST + h * M_SLOPE
M_CONST = ((0, -2, 6), (0, F(-9, 2), F(27, 2)), (0, -3, 9))
M_SLOPE = ((1, 0, 1), (0, F(3, 4), F(3, 2)), (0, 0, F(3, 2)))

SEED_OFFSET = 1e-3
FLOW_RTOL = 1e-12


class PFSingularError(ArithmeticError):
    """The Picard-Fuchs matrix is (numerically) singular at the requested level."""


class IntegrationError(RuntimeError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class CapabilityError(ValueError):
    """Requested series order beyond the tabulated expansion."""


def pf_matrix(h):
    """M(h); exact (object array) for rational ``h``, float array otherwise."""
    exact = isinstance(h, (int, Fraction)) and not isinstance(h, bool)
    rows = [[M_CONST[i][j] + h * M_SLOPE[i][j] for j in range(3)] for i in range(3)]
    if exact:
        return np.array([[F(v) for v in r] for r in rows], dtype=object)
    return np.array(rows, dtype=float)


def pf_determinant(h):
    """Cofactor expansion of det M(h) along the first column."""
    m = pf_matrix(h)
    return m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])


def pf_derivatives(values, h, min_det: float = 1e-13):
    """Solve ``M(h) u' = u`` for ``u' = (I_*', I_2', I_0')``.

    ``values`` may be a length-3 vector or an array of shape (3, n) paired
    with an array of levels ``h`` of length n.
    """
    u = np.asarray(values, dtype=float)
    h = np.asarray(h, dtype=float)
    det2 = 9.0 / 8.0 * h * (h + 4.0)
    if np.any(np.abs(h * det2) < min_det):
        bad = h[np.abs(h * det2) < min_det] if h.ndim else h
        raise PFSingularError(f"Picard-Fuchs matrix singular at h={bad}")
    s, p, q = u[0], u[1], u[2]
    a, b = 0.75 * (h - 6.0), 1.5 * (h + 9.0)
    c, d = -3.0, 1.5 * (h + 6.0)
    dp = (d * p - b * q) / det2
    dq = (a * q - c * p) / det2
    ds = (s + 2.0 * dp - (h + 6.0) * dq) / h
    return np.array([ds, dp, dq])


def second_derivatives(dI2, dI0, h):
    """(I_2'', I_0'', I_*'') from the first derivatives."""
    h = check_level(h)
    den = 3.0 * h * (h + 4.0)
    dd2 = ((h + 6.0) * dI2 - 2.0 * (9.0 + 2.0 * h) * dI0) / den
    dd0 = (2.0 * dI2 - (6.0 + h) * dI0) / den
    dds = -2.0 * dI0 / (3.0 * h)
    return dd2, dd0, dds


# series ------------------------------------------------------------------------

# expansions at h = -4 in powers of (h + 4), in units of I_0'(-4)
CENTER_SERIES: Dict[str, Tuple[Fraction, ...]] = {
    "Istar": (F(0), F(0), F(1, 12), F(11, 1296), F(109, 93312)),
    "I2": (F(0), F(1), F(1, 9), F(17, 1944), F(455, 419904)),
    "I0": (F(0), F(1), F(1, 36), F(5, 1944), F(35, 104976)),
}

# expansions at h = 0: coefficients of 1, h ln|h|, h ln^2|h|, h, with the
# unknown linear coefficient expressed through the constant c as (offset, slope)
SEPARATRIX_SERIES = {
    "Istar": {"1": F(-6), "h ln^2": F(-1, 6)},
    "I2": {"1": F(-27, 2), "h ln": F(3, 2), "h": (F(3), F(3))},
    "I0": {"1": F(-9), "h ln": F(1, 2), "h": (F(0), F(1))},
}


@dataclass(frozen=True)
class SeriesSeed:
    """Truncated expansion of (I_*, I_2, I_0) at an endpoint of (-4, 0)."""

    point: int
    order: int
    coefficients: Dict[str, tuple]
    scale: float | None = None
    c: float | None = None
    c_residual: float | None = None

    def values(self, h: float) -> np.ndarray:
        """(I_*, I_2, I_0) from the truncated expansion."""
        if self.point == -4:
            if self.scale is None:
                raise ValueError("centre expansion needs the scale I_0'(-4)")
            t = h + 4.0
            return np.array([
                self.scale * sum(float(c) * t ** k for k, c in enumerate(self.coefficients[n]))
                for n in ("Istar", "I2", "I0")
            ])
        return self._separatrix_values(h)

    def derivatives(self, h: float) -> np.ndarray:
        """h-derivatives of the truncated centre expansion."""
        if self.point != -4:
            raise ValueError("derivatives are provided for the centre expansion only")
        t = h + 4.0
        return np.array([
            self.scale * sum(k * float(c) * t ** (k - 1) for k, c in enumerate(self.coefficients[n]) if k)
            for n in ("Istar", "I2", "I0")
        ])

    def _separatrix_values(self, h: float) -> np.ndarray:
        if self.c is None:
            raise ValueError("separatrix expansion needs the constant c")
        L = np.log(abs(h))
        out = []
        for n in ("Istar", "I2", "I0"):
            co = self.coefficients[n]
            v = float(co["1"])
            v += float(co.get("h ln", 0)) * h * L + float(co.get("h ln^2", 0)) * h * L * L
            if "h" in co:
                off, slope = co["h"]
                v += (float(off) + float(slope) * self.c) * h
            out.append(v)
        return np.array(out)


def series_seed(point: int, order: int = 4, scale: float | None = None, c: float | None = None) -> SeriesSeed:
    """Printed endpoint expansions.

    At ``-4`` coefficients are exact up to degree 4 (``order <= 4``) in units
    of ``scale = I_0'(-4)``; when ``scale`` is omitted it is measured by
    ``center_slope``.  At ``0`` only the leading terms are known
    (``order <= 1``) and the constant ``c`` is fitted from quadrature unless
    given.
    """
    if point == -4:
        if not 0 <= order <= 4:
            raise CapabilityError(f"centre expansion tabulated to degree 4, not {order}")
        coeffs = {k: v[: order + 1] for k, v in CENTER_SERIES.items()}
        return SeriesSeed(-4, order, coeffs, scale=center_slope() if scale is None else scale)
    if point == 0:
        if not 0 <= order <= 1:
            raise CapabilityError(f"separatrix expansion tabulated to first order, not {order}")
        residual = None
        if c is None:
            c, residual = fit_separatrix_constant()
        return SeriesSeed(0, order, SEPARATRIX_SERIES, c=c, c_residual=residual)
    raise ValueError("expansion points are -4 and 0")


@lru_cache(maxsize=None)
def center_series_exact(order: int) -> Dict[str, Tuple[Fraction, ...]]:
    """Taylor coefficients at -4 of the analytic solution, normalised by I_0'(-4) = 1.

    Writing ``u = sum u_n t^n`` with ``t = h + 4``, the system gives
    ``M(-4) (n+1) u_{n+1} = (1 - n M_SLOPE) u_n``.  ``M(-4)`` has rank 2;
    its kernel direction (0, 1, 1) is fixed one order later by the
    solvability condition, which degenerates only at n = 1 (normalisation).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    s = [F(0), F(0)]
    p = [F(0), F(1)]
    q = [F(0), F(1)]
    for n in range(1, order):
        # right-hand side rows (I - n M_SLOPE) u_n
        r1 = p[n] - n * (F(3, 4) * p[n] + F(3, 2) * q[n])
        r2 = q[n] - n * F(3, 2) * q[n]
        if n >= 2:
            # fix the kernel component of u_n from r1 = 5/2 r2
            kc = F(3, 2) * (n - 1)
            defect = r1 - F(5, 2) * r2
            cn = -defect / kc
            p[n] += cn
            q[n] += cn
            r1 = p[n] - n * (F(3, 4) * p[n] + F(3, 2) * q[n])
            r2 = q[n] - n * F(3, 2) * q[n]
        p_next, q_next = F(0), r2 / (3 * (n + 1))
        s_next = (-(s[n] - n * (s[n] + q[n])) / (n + 1) - 2 * p_next + 2 * q_next) / 4
        s.append(s_next)
        p.append(p_next)
        q.append(q_next)
    # the last order still carries an undetermined kernel component
    n = order
    r1 = p[n] - n * (F(3, 4) * p[n] + F(3, 2) * q[n])
    r2 = q[n] - n * F(3, 2) * q[n]
    cn = -(r1 - F(5, 2) * r2) / (F(3, 2) * (n - 1))
    p[n] += cn
    q[n] += cn
    return {"Istar": tuple(s), "I2": tuple(p), "I0": tuple(q)}


@lru_cache(maxsize=None)
def _center_series_float(order: int) -> np.ndarray:
    ex = center_series_exact(order)
    return np.array([[float(c) for c in ex[n]] for n in ("Istar", "I2", "I0")])


def center_series_values(h, scale: float, order: int = 60, derivatives: int = 0) -> np.ndarray:
    """Evaluate the centre series (and t-derivatives) at ``h``; shape (derivatives+1, 3)."""
    t = float(h) + 4.0
    coef = _center_series_float(order)
    out = np.empty((derivatives + 1, 3))
    c = coef.copy()
    for k in range(derivatives + 1):
        out[k] = np.polynomial.polynomial.polyval(t, c.T) * scale
        c = np.array([np.polynomial.polynomial.polyder(row) for row in c]) if k < derivatives else c
    return out


@lru_cache(maxsize=1)
def center_slope(offsets=(1e-3, 2e-3, 4e-3)) -> float:
    """Measured I_0'(-4) from quadrature near the centre.

    ``I_0'`` divided by the derivative of the normalised centre series is
    constant up to quadrature error; the average over a few offsets is
    returned.
    """
    ratios = []
    for t in offsets:
        d0 = abelian_dI(-4.0 + t)[0]
        ds = center_series_values(-4.0 + t, 1.0, derivatives=1)[1][2]
        ratios.append(d0 / ds)
    return float(np.mean(ratios))


@lru_cache(maxsize=1)
def fit_separatrix_constant(levels=(-1e-4, -3e-5, -1e-5, -3e-6, -1e-6)):
    """Least-squares estimate of c in I_0 = -9 + h ln|h|/2 + c h + ...

    Fits ``(I_0 + 9 - h ln|h|/2)/h = c + a h ln|h| + b h``; returns ``(c, rms residual)``.
    """
    hs = np.asarray(levels, dtype=float)
    y = np.array([(abelian_I(0, h) + 9.0 - 0.5 * h * np.log(-h)) / h for h in hs])
    A = np.column_stack([np.ones_like(hs), hs * np.log(-hs), hs])
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ sol - y) ** 2)))
    return float(sol[0]), resid


# numerical flow ------------------------------------------------------------------


def _rhs(h, u):
    return pf_derivatives(u, h)


def _frame(h, u) -> IntegralFrame:
    d = pf_derivatives(u, h)
    return IntegralFrame(h=float(h), Istar=u[0], I2=u[1], I0=u[2], dIstar=d[0], dI2=d[1], dI0=d[2])


def pf_flow(h_from: float, seed, h_to: float, rtol: float = FLOW_RTOL, atol: float = 1e-15) -> IntegralFrame:
    """Integrate the system from ``(h_from, seed)`` to ``h_to``.

    ``seed`` is an IntegralFrame or the vector (I_*, I_2, I_0).
    """
    h_from, h_to = check_level(h_from), check_level(h_to)
    u0 = seed.values if isinstance(seed, IntegralFrame) else np.asarray(seed, dtype=float)
    if h_from == h_to:
        return _frame(h_to, u0)
    sol = solve_ivp(_rhs, (h_from, h_to), u0, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"Picard-Fuchs flow failed: {sol.message}", location=float(sol.t[-1]))
    return _frame(h_to, sol.y[:, -1])


def _rhs_log(s, z):
    # z = (u, u') with u = (I_*, I_2, I_0), independent variable s = ln|h|.
    # The differentiated system gives u'' from u' alone, and d/ds = h d/dh
    # keeps everything regular as h -> 0.
    h = -np.exp(s)
    ds, d2, d0 = z[3], z[4], z[5]
    q = 3.0 * (h + 4.0)
    dd2 = ((h + 6.0) * d2 - 2.0 * (9.0 + 2.0 * h) * d0) / q
    dd0 = (2.0 * d2 - (6.0 + h) * d0) / q
    dds = -2.0 * d0 / 3.0
    return np.array([h * ds, h * d2, h * d0, dds, dd2, dd0])


@dataclass
class PicardFuchsFlow:
    """Dense Picard-Fuchs solution on ``(-4, h_end]``.

    Integrated in ``s = ln|h|`` from ``-4 + delta`` (seeded by the degree-4
    centre expansion) to ``h_end``, carrying the integrals together with
    their first derivatives.  Levels closer to the centre than ``delta`` are
    served by the exact centre series.
    """

    delta: float = SEED_OFFSET
    h_end: float = -1e-30
    rtol: float = FLOW_RTOL
    scale: float | None = None
    _sol: object = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.scale is None:
            self.scale = center_slope()
        seed = series_seed(-4, 4, scale=self.scale)
        h0 = -4.0 + self.delta
        u0 = seed.values(h0)
        du0 = seed.derivatives(h0)
        z0 = np.concatenate([u0, du0])
        sol = solve_ivp(_rhs_log, (np.log(-h0), np.log(-self.h_end)), z0, method="DOP853",
                        rtol=self.rtol, atol=1e-18, dense_output=True)
        if not sol.success:
            where = -np.exp(sol.t[-1])
            raise IntegrationError(f"Picard-Fuchs flow failed near h={where:.6g}: {sol.message}", location=where)
        self._sol = sol

    @property
    def h_start(self) -> float:
        return -4.0 + self.delta

    def state(self, h) -> np.ndarray:
        """(I_*, I_2, I_0, I_*', I_2', I_0') at scalar or array ``h``; shape (6,) or (6, n)."""
        h_arr = np.atleast_1d(np.asarray(h, dtype=float))
        if np.any((h_arr <= -4.0) | (h_arr >= 0.0)):
            raise ValueError("levels must lie in (-4, 0)")
        if np.any(h_arr > self.h_end):
            raise ValueError(f"flow ends at {self.h_end}")
        out = np.empty((6, h_arr.size))
        near = h_arr < self.h_start
        if np.any(~near):
            out[:, ~near] = self._sol.sol(np.log(-h_arr[~near]))
        for k in np.flatnonzero(near):
            v = center_series_values(h_arr[k], self.scale, order=40, derivatives=1)
            out[:3, k], out[3:, k] = v[0], v[1]
        return out[:, 0] if np.ndim(h) == 0 else out

    def values(self, h) -> np.ndarray:
        return self.state(h)[:3]

    def derivatives(self, h) -> np.ndarray:
        return self.state(h)[3:]

    def frame(self, h: float) -> IntegralFrame:
        z = self.state(float(h))
        return IntegralFrame(h=float(h), Istar=z[0], I2=z[1], I0=z[2], dIstar=z[3], dI2=z[4], dI0=z[5])

    def pf_residual(self, h) -> np.ndarray:
        """Relative residual |M(h) u' - u| / |u| along the flow."""
        z = np.atleast_2d(self.state(h).T).T
        h = np.atleast_1d(np.asarray(h, dtype=float))
        out = []
        for k in range(h.size):
            r = pf_matrix(h[k]) @ z[3:, k] - z[:3, k]
            out.append(np.linalg.norm(r) / np.linalg.norm(z[:3, k]))
        return np.array(out)


@lru_cache(maxsize=4)
def default_flow(delta: float = SEED_OFFSET, h_end: float = -1e-30) -> PicardFuchsFlow:
    """Shared flow instance; immutable after construction."""
    return PicardFuchsFlow(delta=delta, h_end=h_end)
