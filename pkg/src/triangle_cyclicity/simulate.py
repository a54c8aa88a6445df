"""Direct simulation of the perturbed triangle system and its return map.

    x' = x (beta - beta x - (beta+1) y) + eps0 x^2 + eps1 y^2
    y' = y (-alpha + (alpha+1) x + alpha y) + eps0 y^2 + eps2 x^2

with alpha = 1 + eps3, beta = 1 + eps4.  At eps = 0 the function
H = xy(1 - x - y) is a first integral and the orbits inside the triangle
circle the centre (1/3, 1/3).

The return map lives on the diagonal segment from the centre to the origin,
parametrised by H.  The change of H over one revolution is obtained by
integrating dH/dt along the orbit; dH/dt is written with the unperturbed
part cancelled symbolically, so it is O(eps) pointwise and the small
displacement is not lost to cancellation between two O(1) values.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .cyclicity import mu_from_eps
from .geometry import LEVEL_FACTOR, check_level, level_from_h_chart, triangle_hamiltonian

ODE_RTOL = 1e-12
DEFAULT_WINDOW = (-3.9, -0.1)
SMALLNESS_BOUND = 0.1
ESCAPE_MARGIN = 0.25


class EscapeError(RuntimeError):
    """The orbit left the triangle or did not return."""


class GaugeError(ValueError):
    """The requested mu direction cannot be reached in the chosen gauge."""


@dataclass(frozen=True)
class EpsVector:
    e0: float = 0.0
    e1: float = 0.0
    e2: float = 0.0
    e3: float = 0.0
    e4: float = 0.0
    gauge: str = "direct"

    def __post_init__(self):
        if max(abs(v) for v in self.values) > SMALLNESS_BOUND:
            raise ValueError(f"perturbation {self.values} exceeds the smallness bound {SMALLNESS_BOUND}")

    @property
    def values(self) -> Tuple[float, float, float, float, float]:
        return (self.e0, self.e1, self.e2, self.e3, self.e4)

    @property
    def alpha(self) -> float:
        return 1.0 + self.e3

    @property
    def beta(self) -> float:
        return 1.0 + self.e4

    @property
    def mu(self) -> tuple:
        return mu_from_eps(self.values)


def _eps(eps) -> EpsVector:
    if isinstance(eps, EpsVector):
        return eps
    return EpsVector(*[float(v) for v in eps])


def vector_field(x, y, eps):
    """Right-hand side of the perturbed system."""
    e = _eps(eps)
    a, b = e.alpha, e.beta
    dx = x * (b - b * x - (b + 1.0) * y) + e.e0 * x * x + e.e1 * y * y
    dy = y * (-a + (a + 1.0) * x + a * y) + e.e0 * y * y + e.e2 * x * x
    return dx, dy


def energy_rate(x, y, eps):
    """dH/dt along the perturbed flow, with the unperturbed part cancelled."""
    e = _eps(eps)
    hx = y * (1.0 - 2.0 * x - y)
    hy = x * (1.0 - x - 2.0 * y)
    r = 1.0 - x - y
    return (
        e.e4 * x * r * hx
        - e.e3 * y * r * hy
        + e.e0 * (x * x * hx + y * y * hy)
        + e.e1 * y * y * hx
        + e.e2 * x * x * hy
    )


# section ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectionPoint:
    """Point (s, s) on the diagonal between the origin and the centre."""

    s: float

    @property
    def h00(self) -> float:
        return self.s * self.s * (1.0 - 2.0 * self.s)

    @property
    def h(self) -> float:
        return LEVEL_FACTOR * self.h00


def section_point(h: float) -> SectionPoint:
    """Section point on the oval of H-chart level ``h``."""
    h00 = float(level_from_h_chart(check_level(h)))
    s = brentq(lambda t: t * t * (1.0 - 2.0 * t) - h00, 0.0, 1.0 / 3.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)
    return SectionPoint(s)


@dataclass
class ReturnResult:
    start: SectionPoint
    s_return: float
    displacement: float  # change of H over one revolution, from the integrated rate
    direct_difference: float  # H(return) - H(start) evaluated pointwise
    period: float
    closure: float  # distance between start and return point
    n_steps: int


def _rhs(eps):
    e = _eps(eps)

    def f(t, z):
        x, y = z[0], z[1]
        dx, dy = vector_field(x, y, e)
        return [dx, dy, energy_rate(x, y, e)]

    return f


def poincare_return(start, eps, rtol: float = ODE_RTOL, max_time: float = 1e3) -> ReturnResult:
    """Follow the orbit through ``start`` once around the centre.

    ``start`` is a SectionPoint or an H-chart level.  The orbit first crosses
    the diagonal beyond the centre (x - y decreasing) and then returns to the
    section (x - y increasing).
    """
    sp = start if isinstance(start, SectionPoint) else section_point(start)
    e = _eps(eps)
    rhs = _rhs(e)

    # the triangle edges are only invariant at eps = 0, so allow a margin
    def escape(t, z):
        return min(z[0], z[1], 1.0 - z[0] - z[1]) + ESCAPE_MARGIN
    escape.terminal = True

    def far(t, z):
        return z[0] - z[1]
    far.terminal, far.direction = True, -1.0

    def near(t, z):
        return z[0] - z[1]
    near.terminal, near.direction = True, 1.0

    z0 = [sp.s, sp.s, 0.0]
    steps = 0
    t0 = 0.0
    for event in (far, near):
        sol = solve_ivp(rhs, (t0, t0 + max_time), z0, method="DOP853", rtol=rtol, atol=1e-16,
                        events=(event, escape))
        steps += sol.t.size
        if sol.t_events[1].size:
            raise EscapeError(f"orbit from s={sp.s} left the triangle at t={sol.t_events[1][0]:.6g}")
        if not sol.t_events[0].size:
            raise EscapeError(f"orbit from s={sp.s} did not reach the diagonal within t={max_time}")
        t0 = float(sol.t_events[0][0])
        z0 = sol.y_events[0][0]
    x, y, dh = z0
    s_ret = 0.5 * (x + y)
    direct = triangle_hamiltonian(x, y) - sp.h00
    return ReturnResult(sp, float(s_ret), float(dh), float(direct), t0,
                        float(np.hypot(x - sp.s, y - sp.s)), steps)


def displacement(h: float, eps, rtol: float = ODE_RTOL) -> float:
    return poincare_return(h, eps, rtol).displacement


@dataclass
class CycleCount:
    count: int
    levels: List[float]
    grid: List[float]
    displacements: List[float]  # NaN where the orbit escaped
    window: Tuple[float, float]

    @property
    def escaped(self) -> List[float]:
        return [h for h, d in zip(self.grid, self.displacements) if not np.isfinite(d)]


def _safe_displacement(h, e, rtol):
    try:
        return displacement(h, e, rtol)
    except EscapeError:
        return float("nan")


def count_cycles(eps, n_section: int = 48, window: Tuple[float, float] = DEFAULT_WINDOW,
                 rtol: float = ODE_RTOL, xtol: float = 1e-7) -> CycleCount:
    """Sign changes of the return-map displacement over a section grid.

    Each sign change between neighbouring grid levels is refined by bracketing
    root finding; levels are in the H chart.  Levels whose orbit escapes are
    kept as NaN and never bracket a cycle.
    """
    e = _eps(eps)
    grid = np.linspace(window[0], window[1], n_section)
    d = np.array([_safe_displacement(h, e, rtol) for h in grid])
    levels = []
    for i in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
        levels.append(brentq(lambda h: displacement(h, e, rtol), grid[i], grid[i + 1], xtol=xtol))
    return CycleCount(len(levels), [float(x) for x in levels], [float(x) for x in grid],
                      [float(x) for x in d], window)


# eps from mu ---------------------------------------------------------------------------


def _gauge_solution(m, s):
    """eps realising mu = s m in the gauge selected by m."""
    m1, m2, m3, m4 = (s * float(v) for v in m)
    if m3 != 0.0:
        if m4 == 0.0:
            raise GaugeError("mu3 != 0 with mu4 = 0 is not reachable with eps3 = -eps4")
        # cube roots first so that tiny mu3 does not underflow when squared
        tau = np.cbrt(m3) ** 2 / np.cbrt(6.0 * m4)
        S = np.cbrt(6.0 * m4) ** 2 / np.cbrt(m3)  # = mu3 / tau^2
        D = -2.0 * m2 / tau
        return (-m1, (S + D) / 2.0, (S - D) / 2.0, tau, -tau), "eps3=-eps4"
    if m4 != 0.0:
        if m2 == 0.0:
            raise GaugeError("mu4 != 0 with mu2 = mu3 = 0 is not reachable with eps3 = eps4")
        tau = np.sqrt(2.0 * abs(m2))
        S = -2.0 * m2 / tau
        D = -3.0 * m4 / m2
        return (-m1, (S + D) / 2.0, (S - D) / 2.0, tau, tau), "eps3=eps4"
    if m2 != 0.0:
        tau = np.sqrt(2.0 * abs(m2))
        S = -2.0 * m2 / tau
        return (-m1, S / 2.0, S / 2.0, tau, tau), "eps3=eps4"
    return (-m1, 0.0, 0.0, 0.0, 0.0), "eps0"


def eps_from_mu(mu: Sequence[float], delta: float) -> EpsVector:
    """Perturbation of size max|eps_i| = delta whose mu is a positive multiple of ``mu``.

    If mu3 != 0 the gauge eps3 = -eps4 = tau is used, which gives the closed form
    tau^3 = mu3^2/(6 mu4), eps1 + eps2 = mu3/tau^2, eps1 - eps2 = -2 mu2/tau.
    Otherwise eps3 = eps4 = tau.  The overall multiple of mu is fixed by
    root finding on max|eps_i|, which increases with it.
    """
    m = np.asarray(mu, dtype=float)
    if not np.any(m):
        return EpsVector(gauge="zero")
    m = m / np.linalg.norm(m)

    def size(s):
        return max(abs(v) for v in _gauge_solution(m, s)[0])

    lo, hi = 1e-30, 1.0
    if size(lo) > delta:
        raise GaugeError(f"direction {m} needs |eps| above {delta} in its gauge")
    while size(hi) < delta:
        hi *= 2.0
    s = brentq(lambda s: size(s) - delta, lo, hi, xtol=1e-300, rtol=1e-15)
    vals, gauge = _gauge_solution(m, s)
    return EpsVector(*(float(v) for v in vals), gauge=gauge)


def direction_cosine(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


# CSV dumps ---------------------------------------------------------------------------------


def orbit_samples(start, eps, n: int = 400, rtol: float = ODE_RTOL):
    """Points (t, x, y, H) sampled along one revolution."""
    r = poincare_return(start, eps, rtol)
    sp = r.start
    ts = np.linspace(0.0, r.period, n)
    sol = solve_ivp(_rhs(eps), (0.0, r.period), [sp.s, sp.s, 0.0], method="DOP853", rtol=rtol,
                    atol=1e-16, t_eval=ts)
    x, y = sol.y[0], sol.y[1]
    return np.column_stack([sol.t, x, y, triangle_hamiltonian(x, y)])


def write_csv(path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{float(v):.17e}" for v in row])


# measured principal part ---------------------------------------------------------------
#
# The leading displacement along a ray t*eps is read off by fitting a
# polynomial in t to displacements at a few symmetric steps.  Rays on which
# the lower-order mu components vanish identically isolate the coefficient
# function of each mu component.

CALIBRATION_RAYS = (
    ((1.0, 0.0, 0.0, 0.0, 0.0), 1),  # mu = (-1, 0, 0, 0)
    ((0.0, 1.0, -1.0, 1.0, -1.0), 2),  # mu = (0, -1, 0, 0)
    ((0.0, 1.0, 1.0, 1.0, -1.0), 3),  # mu = (0, 0, 2, 2/3)
    ((0.0, 1.0, 2.0, 1.0, -0.5), 3),  # mu = (0, 0, 3/2, 1)
)


def displacement_taylor(direction, levels, step: float = 5e-4, n_steps: int = 4,
                        degree: int = 5, rtol: float = ODE_RTOL) -> np.ndarray:
    """Coefficients of t, t^2, ..., t^degree in the displacement along ``t * direction``.

    Returns an array of shape (degree, len(levels)).
    """
    e = np.asarray(direction, dtype=float)
    ts = step * np.repeat(np.arange(1, n_steps + 1), 2) * np.tile([1.0, -1.0], n_steps)
    if ts.size < degree:
        raise ValueError("need at least as many steps as fitted orders")
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    D = np.array([[displacement(h, t * e, rtol) for t in ts] for h in levels])
    V = np.vander(ts, degree + 1, increasing=True)[:, 1:]
    return np.linalg.lstsq(V, D.T, rcond=None)[0]


def measured_principal_basis(levels, step: float = 5e-4, rtol: float = ODE_RTOL) -> np.ndarray:
    """Functions M_k(h) with leading displacement sum_k mu_k M_k(h), measured from orbits.

    Returns shape (len(levels), 4).  The mu values of each ray come from the
    exact eps -> mu map; the first two rays isolate M_1 and M_2, the last two
    give M_3 and M_4 by solving a 2x2 system per level.
    """
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    cols = []
    coefs = []
    for ray, order in CALIBRATION_RAYS:
        mu = np.array(mu_from_eps(ray), dtype=float)
        c = displacement_taylor(ray, levels, step, rtol=rtol)[order - 1]
        coefs.append((mu, c))
    (mu1, c1), (mu2, c2), (mu3a, c3a), (mu3b, c3b) = coefs
    cols.append(c1 / mu1[0])
    cols.append(c2 / mu2[1])
    A = np.array([mu3a[2:], mu3b[2:]])
    m34 = np.linalg.solve(A, np.array([c3a, c3b]))
    cols.extend([m34[0], m34[1]])
    return np.column_stack(cols)


@dataclass
class CalibratedBasis:
    """Cubic-spline interpolant of the measured principal part."""

    levels: np.ndarray
    values: np.ndarray

    def __call__(self, h) -> np.ndarray:
        from scipy.interpolate import CubicSpline
        return CubicSpline(self.levels, self.values, axis=0)(h)

    def direction_for_zeros(self, targets: Sequence[float]) -> np.ndarray:
        """mu whose measured principal part vanishes at the three target levels."""
        A = self(np.asarray(targets, dtype=float))
        m = np.linalg.svd(A)[2][-1]
        return m / np.linalg.norm(m)


def calibrate(levels=None, step: float = 5e-4) -> CalibratedBasis:
    if levels is None:
        levels = np.linspace(-3.95, -0.8, 14)
    levels = np.asarray(levels, dtype=float)
    return CalibratedBasis(levels, measured_principal_basis(levels, step))
