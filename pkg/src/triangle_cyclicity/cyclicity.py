"""Principal displacement part J(h), its derivative factor f(h), and zero counts.

Parameters live in three charts: the bifurcation coefficients
``mu = (mu1..mu4)``, the combinations ``greek = (lambda, sigma, gamma, kappa)``
with ``greek = L mu`` for an integer matrix L, and the perturbation
coefficients ``eps = (eps0..eps4)`` of the vector field (one-way map to mu).

In the greek chart

    J(h) = lambda g_l + sigma g_s + gamma g_g + kappa g_k,

each g a fixed combination of I_0', I_2', I_*' with coefficients linear in
h, and ``J'(h) = f(h) I_0'(h) / (7776 h (h+4))`` with

    f(h) = -16 lambda - 16 sigma h + (lambda - 4 sigma + 2 gamma - 8 kappa) h^2
           - 32 (gamma + kappa h) w(h).

Zero counting uses the second identity: between consecutive sign changes
of f the function J is monotone, so each such piece holds at most one zero,
decided by the signs at its ends.  The ends at -4 and 0 use the exact centre
value ``J(-4) = I_0'(-4)(4 kappa - gamma)/162`` and the logarithmic growth of J
at the separatrix.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .geometry import check_level
from .picard_fuchs import center_series_exact, default_flow, pf_matrix
from .quadrature import IntegralFrame, integral_frame
from .ratio import riccati_solution, w_derivs, w_riccati, CENTER_RATIO

F = Fraction

# greek = L_MATRIX @ mu
L_MATRIX = (
    (0, -1296, -648, 0),
    (-144, -468, -270, -6),
    (0, 216, -324, 0),
    (0, 54, -81, 1),
)

GAMMA_SPLIT = F(-26, 7)


class DegenerateParamsError(ValueError):
    """All parameters vanish, so J is identically zero."""


class WindowTooLargeError(RuntimeError):
    """A constructed parameter point failed verification."""


# parameter charts ----------------------------------------------------------------


def _exact_inverse(m):
    n = len(m)
    a = [[F(x) for x in row] + [F(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                c = a[r][col]
                a[r] = [x - c * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


L_INVERSE = _exact_inverse(L_MATRIX)


def _matvec(m, v):
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def mu_from_eps(eps: Sequence) -> tuple:
    """Bifurcation coefficients induced by the perturbation (eps0..eps4)."""
    e0, e1, e2, e3, e4 = eps
    p = e1 * e3 - e2 * e4
    return (-e0, -(e1 * e3 + e2 * e4) / 2, p * (e3 - e4) / 2, p * (e1 + e2) / 6)


@dataclass(frozen=True)
class PerturbationParams:
    """One parameter point; ``mu`` and ``greek`` are always consistent."""

    mu: tuple
    greek: tuple
    eps: Optional[tuple] = None

    @classmethod
    def from_mu(cls, mu) -> "PerturbationParams":
        mu = tuple(mu)
        if len(mu) != 4:
            raise ValueError("mu has four components")
        return cls(mu, _matvec(L_MATRIX, mu))

    @classmethod
    def from_greek(cls, greek) -> "PerturbationParams":
        greek = tuple(greek)
        if len(greek) != 4:
            raise ValueError("greek has four components (lambda, sigma, gamma, kappa)")
        return cls(_matvec(L_INVERSE, greek), greek)

    @classmethod
    def from_eps(cls, eps) -> "PerturbationParams":
        eps = tuple(eps)
        if len(eps) != 5:
            raise ValueError("eps has five components")
        mu = mu_from_eps(eps)
        return cls(mu, _matvec(L_MATRIX, mu), eps)

    @property
    def greek_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.greek])

    @property
    def mu_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.mu])

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.mu)

    def normalized(self) -> "PerturbationParams":
        """Same zero set with |greek| = 1."""
        g = self.greek_array
        n = np.linalg.norm(g)
        if n == 0:
            raise DegenerateParamsError("all parameters vanish")
        return PerturbationParams.from_greek(tuple(g / n))

    def as_dict(self) -> dict:
        out = {"mu": [float(x) for x in self.mu], "greek": [float(x) for x in self.greek]}
        if self.eps is not None:
            out["eps"] = [float(x) for x in self.eps]
        return out


def convert_params(source: str, values) -> PerturbationParams:
    """Build a parameter point from the ``mu``, ``greek`` or ``eps`` chart."""
    if source == "mu":
        return PerturbationParams.from_mu(values)
    if source == "greek":
        return PerturbationParams.from_greek(values)
    if source == "eps":
        return PerturbationParams.from_eps(values)
    raise ValueError(f"unknown chart {source!r}")


def _as_params(params) -> PerturbationParams:
    if isinstance(params, PerturbationParams):
        return params
    return PerturbationParams.from_greek(params)


# J, f and rho -----------------------------------------------------------------------


def j_basis(h, dIstar, dI2, dI0) -> np.ndarray:
    """Rows g_lambda, g_sigma, g_gamma, g_kappa (J = greek . basis)."""
    h = np.asarray(h, dtype=float)
    return np.array([
        (6.0 + h) / 5184.0 * dI0 - dI2 / 2592.0 + dIstar / 1296.0,
        (-24.0 - 4.0 * h) / 5184.0 * dI0 + 4.0 * dI2 / 2592.0,
        (-20.0 + 2.0 * h) / 5184.0 * dI0 - 2.0 * dI2 / 2592.0 + 6.0 * dIstar / 1296.0,
        (144.0 - 8.0 * h) / 5184.0 * dI0 - 24.0 * dI2 / 2592.0,
    ])


def f_basis(h, w) -> np.ndarray:
    """Rows multiplying (lambda, sigma, gamma, kappa) in f(h)."""
    h = np.asarray(h, dtype=float)
    w = np.asarray(w, dtype=float)
    return np.array([
        -16.0 + h * h,
        -16.0 * h - 4.0 * h * h,
        2.0 * h * h - 32.0 * w,
        -8.0 * h * h - 32.0 * h * w,
    ])


def reduced_J(frame: IntegralFrame) -> np.ndarray:
    """(J_1, J_2, J_3, J_4) expressed through I_*, I_2, I_0 and derivatives."""
    h, s, i2, i0, d2, d0 = frame.h, frame.Istar, frame.I2, frame.I0, frame.dI2, frame.dI0
    j1 = 2.0 / 27.0 * i0
    j2 = 2.0 / (27.0 * h) * ((h + 18.0) * i0 - 12.0 * i2)
    j3 = 1.0 / (18.0 * h) * ((h - 12.0) * i0 + 24.0 * i2 - 36.0 * s)
    j4 = ((19.0 * h + 702.0) * i0 - 324.0 * i2) / (10368.0 * h) + (
        (-3888.0 - 324.0 * h + 7.0 * h * h) * d0 + 216.0 * (6.0 + h) * d2
    ) / (20736.0 * h)
    return np.array([j1, j2, j3, j4])


def _frame(h, method):
    if method == "flow":
        return default_flow().frame(h)
    if method == "quadrature":
        return integral_frame(h)
    raise ValueError(f"unknown method {method!r}")


def J_eval(h: float, params, method: str = "flow") -> float:
    """J(h) from the greek form; ``method`` is ``"flow"`` or ``"quadrature"``."""
    h = check_level(h)
    p = _as_params(params)
    fr = _frame(h, method)
    return float(p.greek_array @ j_basis(h, fr.dIstar, fr.dI2, fr.dI0))


def J_from_reductions(h: float, params, method: str = "flow") -> float:
    """mu1 J_1 + ... + mu4 J_4 with each J_k from its reduction."""
    h = check_level(h)
    p = _as_params(params)
    return float(p.mu_array @ reduced_J(_frame(h, method)))


def f_eval(h, params, w=None):
    """f(h); w defaults to the Riccati solution w(h)."""
    p = _as_params(params)
    h = np.asarray(h, dtype=float)
    if w is None:
        w = w_riccati(h)
    return p.greek_array @ f_basis(h, w)


def J_center_value(params, scale: float | None = None) -> float:
    """lim J(h) as h -> -4, i.e. I_0'(-4) (4 kappa - gamma) / 162."""
    p = _as_params(params)
    _, _, gamma, kappa = p.greek_array
    a0 = default_flow().scale if scale is None else scale
    return a0 * (4.0 * kappa - gamma) / 162.0


def f_center_slope(params) -> float:
    """f'(-4) using w(-4) = 1 and w'(-4) = 1/6."""
    lam, sig, gam, kap = _as_params(params).greek_array
    return -16.0 * sig - 8.0 * (lam - 4.0 * sig + 2.0 * gam - 8.0 * kap) - 32.0 * kap - 32.0 * (gam - 4.0 * kap) / 6.0


def f_separatrix_value(params) -> float:
    """f(0) = -16 (lambda + 6 gamma)."""
    lam, _, gam, _ = _as_params(params).greek_array
    return -16.0 * (lam + 6.0 * gam)


def rho_eval(h, gamma: float):
    """rho(h) = w''/w''' + (h + gamma)/3 along w = w(h) (kappa = 1)."""
    h = np.asarray(h, dtype=float)
    w = w_riccati(h)
    _, w2, w3 = w_derivs(h, w)
    if np.any(w3 == 0):
        raise ArithmeticError("w''' vanished")
    return w2 / w3 + (h + gamma) / 3.0


def rho_center_limit(gamma) -> Fraction:
    """rho(-4) from the centre expansion of w."""
    return 2 * CENTER_RATIO[2] / (6 * CENTER_RATIO[3]) + (F(-4) + F(gamma)) / 3


def f_third_derivative(h, params):
    """f'''(h) = -96 kappa w'' - 32 (gamma + kappa h) w'''."""
    _, _, gam, kap = _as_params(params).greek_array
    h = np.asarray(h, dtype=float)
    _, w2, w3 = w_derivs(h, w_riccati(h))
    return -96.0 * kap * w2 - 32.0 * (gam + kap * h) * w3


# zero counting -----------------------------------------------------------------------


@dataclass
class Zero:
    location: float
    bracket: Tuple[float, float]
    direction: int  # +1 if J increases through the zero
    multiplicity_suspect: bool
    region: str  # "center", "interior" or "separatrix"
    log_abs_h: float
    resolved: bool = True


@dataclass
class ZeroReport:
    greek: Tuple[float, ...]
    zeros: List[Zero]
    center: dict
    separatrix: dict
    critical_points: List[float]
    parity_ok: bool
    grid_sign_changes: int
    suspects_unresolved: int = 0
    window: Tuple[float, float] = (-4.0 + 1e-3, -1e-6)

    @property
    def count(self) -> int:
        return len(self.zeros)

    @property
    def simple(self) -> bool:
        return not any(z.multiplicity_suspect for z in self.zeros)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["count"] = self.count
        return d


def _sign(x, tol=0.0):
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


class ZeroCounter:
    """Zero counter for J on (-4, 0) with cached basis functions on a grid."""

    def __init__(self, delta1: float = 1e-3, delta2: float = 1e-6, n_interior: int = 400,
                 suspect_margin: float = 1e3, noise: float = 1e-13):
        self.delta1, self.delta2 = delta1, delta2
        self.suspect_margin, self.noise = suspect_margin, noise
        self.flow = default_flow()
        self.ric = riccati_solution()
        self.h_end = self.flow.h_end
        grid = np.concatenate([
            -4.0 + np.geomspace(1e-9, 1e-2, 25)[:-1],
            np.linspace(-3.99, -0.01, n_interior)[:-1],
            -np.geomspace(1e-2, -self.h_end, 90),
        ])
        self.grid = grid
        z = self.flow.state(grid)
        self.G = j_basis(grid, z[3], z[4], z[5])
        self.w = self.ric(grid)
        self.Fb = f_basis(grid, self.w)
        self.a0 = self.flow.scale
        # separatrix tail: J' h = f I_0' / 31104 with I_0' = L/2 + c1, w - 3 = 6/(L + K)
        self.L_end = float(np.log(-self.h_end))
        self.c1 = float(z[5, -1] - 0.5 * self.L_end)
        self.K = float(self.ric.K)

    # pointwise evaluation
    def basis_at(self, h: float) -> np.ndarray:
        z = self.flow.state(h)
        return j_basis(h, z[3], z[4], z[5])

    def J(self, g, h: float) -> float:
        return float(g @ self.basis_at(h))

    def _noise(self, g, h: float) -> float:
        """Rounding-level uncertainty of J(h): relative noise times the size of its terms."""
        return self.noise * float(np.abs(g) @ np.abs(self.basis_at(h)))

    def f(self, g, h: float) -> float:
        return float(g @ f_basis(h, self.ric(h)))

    def _tail_J(self, g, L, J_end):
        lam, _, gam, _ = g
        f0 = -16.0 * (lam + 6.0 * gam)
        Le, c1, K = self.L_end, self.c1, self.K
        a = f0 * ((L * L - Le * Le) / 4.0 + c1 * (L - Le))
        b = -192.0 * gam * ((L - Le) / 2.0 + (c1 - K / 2.0) * (np.log(abs(L + K)) - np.log(abs(Le + K))))
        return J_end + (a + b) / 31104.0

    def _region(self, h):
        if h < -4.0 + self.delta1:
            return "center"
        if h > -self.delta2:
            return "separatrix"
        return "interior"

    def count(self, params) -> ZeroReport:
        p = _as_params(params)
        g = p.greek_array
        if not np.any(g):
            raise DegenerateParamsError("J vanishes identically when all parameters are zero")
        Jg = g @ self.G
        fg = g @ self.Fb
        fscale = float(np.max(np.abs(fg)))
        grid = self.grid

        # critical points of J in (-4, h_end]: sign changes of f plus resolved near-tangencies
        crit = []
        tangencies = []
        sf = np.sign(fg)
        for i in np.flatnonzero(sf[:-1] * sf[1:] < 0):
            crit.append(brentq(lambda x: self.f(g, x), grid[i], grid[i + 1], xtol=1e-300, rtol=1e-14))
        absf = np.abs(fg)
        for i in range(1, len(grid) - 1):
            if absf[i] <= absf[i - 1] and absf[i] <= absf[i + 1] and sf[i - 1] == sf[i] == sf[i + 1] \
                    and absf[i] < 1e-3 * fscale:
                s = sf[i]
                res = minimize_scalar(lambda x: s * self.f(g, x), bounds=(grid[i - 1], grid[i + 1]),
                                      method="bounded", options={"xatol": 1e-14})
                fx = self.f(g, res.x)
                if s * fx < 0:
                    crit.append(brentq(lambda x: self.f(g, x), grid[i - 1], res.x, xtol=1e-300, rtol=1e-14))
                    crit.append(brentq(lambda x: self.f(g, x), res.x, grid[i + 1], xtol=1e-300, rtol=1e-14))
                else:
                    tangencies.append(float(res.x))
        crit.sort()

        # knots where J is evaluated: (location, log|h|, J, noise level of J there)
        J_center = J_center_value(p, self.a0)
        c_noise = self.noise * abs(self.a0) * (abs(g[2]) + 4.0 * abs(g[3])) / 162.0
        knots = [(-4.0, np.log(4.0), J_center, c_noise)]
        if abs(J_center) <= c_noise:
            # J(-4) = 0: take the sign just inside the interval
            knots[0] = (-4.0, np.log(4.0), float(Jg[0]), self._noise(g, grid[0]))
        for c in crit:
            knots.append((c, float(np.log(-c)), self.J(g, c), self._noise(g, c)))
        J_end = float(Jg[-1])
        end_noise = self._noise(g, self.h_end)
        knots.append((self.h_end, self.L_end, J_end, end_noise))

        lam, _, gam, _ = g
        f0 = -16.0 * (lam + 6.0 * gam)
        tail_crit = None
        if f0 != 0.0 and gam != 0.0:
            Lc = 192.0 * gam / f0 - self.K
            if Lc < self.L_end:
                tail_crit = Lc
                knots.append((-np.exp(Lc), Lc, self._tail_J(g, Lc, J_end), end_noise))
        if f0 != 0.0:
            sep = {"kind": "ln^2", "coefficient": f0 / 124416.0, "sign": _sign(f0)}
        elif gam != 0.0:
            sep = {"kind": "ln", "coefficient": -gam / 324.0, "sign": _sign(gam)}
        else:
            sep = {"kind": "finite", "coefficient": J_end, "sign": _sign(J_end, end_noise)}
        end_sign = sep["sign"]
        sep["f0"] = float(f0)
        knots.append((0.0, -np.inf, float(end_sign), 0.0))

        zeros: List[Zero] = []
        unresolved = 0
        for (ha, La, Ja, na), (hb, Lb, Jb, nb) in zip(knots[:-1], knots[1:]):
            sa, sb = _sign(Ja), _sign(Jb)
            if sa == 0 or sb == 0 or sa == sb:
                # J returns toward zero at a critical point without crossing
                if hb != 0.0 and abs(Jb) <= nb:
                    unresolved += 1
                continue
            if La >= self.L_end and Lb >= self.L_end:
                lo = ha if ha > -4.0 else -4.0 + 1e-15
                r = brentq(lambda x: self.J(g, x), lo, hb, xtol=1e-300, rtol=1e-14)
                L = float(np.log(-r))
            else:
                # zero beyond the flow, located in log|h| on the closed-form tail
                hi_L = Lb if np.isfinite(Lb) else self._far_L(g, La, J_end, sa)
                L = brentq(lambda t: self._tail_J(g, t, J_end), hi_L, La, xtol=1e-12)
                r = -float(np.exp(L))
            # a zero next to a critical point where |J| is near the noise floor may be double
            margins = [abs(J) / max(n, 1e-300) for (hk, J, n) in ((ha, Ja, na), (hb, Jb, nb))
                       if hk in crit or (tail_crit is not None and hk == -np.exp(tail_crit))]
            m = min(margins) if margins else np.inf
            suspect = m < self.suspect_margin
            resolved = m > 10.0
            unresolved += int(not resolved)
            zeros.append(Zero(float(r), (float(ha), float(hb)), int(sb), bool(suspect),
                              self._region(r), L, bool(resolved)))
        unresolved += sum(1 for t in tangencies if abs(self.J(g, t)) <= 10.0 * self._noise(g, t))

        center = {
            "value": J_center,
            "sign": _sign(knots[0][2]),
            "f_slope": f_center_slope(p),
        }
        gsc = int(np.sum(np.sign(Jg[:-1]) * np.sign(Jg[1:]) < 0))
        parity_ok = (len(zeros) % 2) == int(center["sign"] != end_sign and center["sign"] != 0 and end_sign != 0)
        all_crit = crit + ([float(-np.exp(tail_crit))] if tail_crit is not None else [])
        return ZeroReport(
            greek=tuple(float(x) for x in g), zeros=zeros, center=center, separatrix=sep,
            critical_points=[float(c) for c in all_crit], parity_ok=bool(parity_ok),
            grid_sign_changes=gsc, suspects_unresolved=int(unresolved),
            window=(-4.0 + self.delta1, -self.delta2),
        )

    def _far_L(self, g, L_start, J_end, s_start):
        L = min(L_start, self.L_end) - 1.0
        while _sign(self._tail_J(g, L, J_end)) == s_start:
            L *= 2.0
            if L < -1e300:
                raise ArithmeticError("no sign change in the separatrix tail")
        return L


@lru_cache(maxsize=4)
def zero_counter(delta1: float = 1e-3, delta2: float = 1e-6) -> ZeroCounter:
    return ZeroCounter(delta1, delta2)


def count_zeros(params, delta1: float = 1e-3, delta2: float = 1e-6) -> ZeroReport:
    """Zeros of J on (-4, 0) for the given parameters (greek tuple or PerturbationParams)."""
    return zero_counter(delta1, delta2).count(params)


# ECT determinants ---------------------------------------------------------------------


def _series_mul(a, b, n):
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n + 1)]


def _series_diff(a):
    return [k * a[k] for k in range(1, len(a))]


def _reduction_series(u, n, inv_h, h, zero):
    """J_1..J_4 as truncated power series given series u = (I_*, I_2, I_0) and 1/h."""
    s, i2, i0 = u
    d2, d0 = _series_diff(i2), _series_diff(i0)

    def lin(c0, c1):  # c0 + c1 h as a series
        out = [zero] * (n + 1)
        out[0] = c0 + c1 * h[0]
        if n >= 1:
            out[1] = c1 * h[1]
        return out

    def add(*terms):
        return [sum(t[k] for t in terms) for k in range(n + 1)]

    def scale(c, a):
        return [c * x for x in a[: n + 1]]

    j1 = scale(F(2, 27) if isinstance(zero, F) else 2.0 / 27.0, i0)
    c = (lambda p, q: F(p, q)) if isinstance(zero, F) else (lambda p, q: p / q)
    j2 = scale(c(2, 27), _series_mul(inv_h, add(_series_mul(lin(18, 1), i0, n), scale(-12, i2)), n))
    j3 = scale(c(1, 18), _series_mul(inv_h, add(_series_mul(lin(-12, 1), i0, n), scale(24, i2), scale(-36, s)), n))
    hh = _series_mul(h, h, n)
    quad = add(lin(-3888, -324), scale(7, hh))
    j4a = scale(c(1, 10368), _series_mul(inv_h, add(_series_mul(lin(702, 19), i0, n), scale(-324, i2)), n))
    j4b = scale(c(1, 20736), _series_mul(inv_h, add(_series_mul(quad, d0, n), scale(216, _series_mul(lin(6, 1), d2, n))), n))
    return [j1, j2, j3, add(j4a, j4b)]


def _series_det(m, n):
    k = len(m)
    if k == 1:
        return m[0][0]
    total = None
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = _series_mul(m[0][j], _series_det(minor, n), n)
        if j % 2:
            term = [-x for x in term]
        total = term if total is None else [a + b for a, b in zip(total, term)]
    return total


def _wronskian_series(js, k, n, zero):
    # row i holds the i-th derivatives; derivative series are padded back to length n+1
    rows = []
    for i in range(k):
        row = []
        for j in range(k):
            a = js[j]
            for _ in range(i):
                a = _series_diff(a) + [zero]
            row.append(a[: n + 1])
        rows.append(row)
    return _series_det(rows, n)


@lru_cache(maxsize=None)
def ect_center_series(order: int = 3) -> Tuple[Tuple[Fraction, ...], ...]:
    """Exact expansions of Delta_1..Delta_4 in powers of (h+4), in units of I_0'(-4)^k."""
    n = order + 6
    ex = center_series_exact(n + 2)
    u = [list(ex["Istar"]), list(ex["I2"]), list(ex["I0"])]
    m = n + 1
    h = [F(-4), F(1)] + [F(0)] * (m - 1)
    inv_h = [F(-1, 4) * F(1, 4) ** k for k in range(m + 1)]
    js = _reduction_series(u, m, inv_h, h, F(0))
    return tuple(tuple(_wronskian_series(js, k, m - 3, F(0))[: order + 1]) for k in range(1, 5))


def _u_jet(h0: float, order: int) -> np.ndarray:
    """Taylor coefficients at h0 of (I_*, I_2, I_0), shape (3, order+1)."""
    flow = default_flow()
    t0 = h0 + 4.0
    if t0 <= 2.5:
        coef = _center_coef_float(160)
        out = np.empty((3, order + 1))
        c = coef.copy()
        fact = 1.0
        for k in range(order + 1):
            out[:, k] = np.polynomial.polynomial.polyval(t0, c.T) * flow.scale / fact
            c = np.array([np.polynomial.polynomial.polyder(row) for row in c])
            fact *= k + 1
        return out
    z = flow.state(h0)
    jet = [z[:3], z[3:]]
    minv = np.linalg.inv(pf_matrix(h0))
    slope = pf_matrix(1.0) - pf_matrix(0.0)
    for n in range(1, order):
        jet.append(minv @ ((np.eye(3) - n * slope) @ jet[n]) / (n + 1))
    return np.array(jet).T


@lru_cache(maxsize=None)
def _center_coef_float(order):
    ex = center_series_exact(order)
    return np.array([[float(c) for c in ex[n]] for n in ("Istar", "I2", "I0")])


@dataclass
class EctResult:
    h: float
    deltas: Tuple[float, float, float, float]
    inconclusive: bool


def ect_determinants(h: float, margin: float = 1e-9) -> EctResult:
    """Wronskian determinants Delta_1..Delta_4 of (J_1, J_2, J_3, J_4) at h."""
    h = check_level(h)
    n = 6
    u = _u_jet(h, n + 1)
    hs = [h, 1.0] + [0.0] * n
    inv_h = [(1.0 / h) * (-1.0 / h) ** k for k in range(n + 1)]
    js = _reduction_series([list(x) for x in u], n, inv_h, hs, 0.0)
    deltas = []
    inconclusive = False
    for k in range(1, 5):
        w = np.array([[js[j][i] * factorial(i) for j in range(k)] for i in range(k)])
        d = float(np.linalg.det(w))
        scale = float(np.prod([np.linalg.norm(row) for row in w]))
        inconclusive |= abs(d) < margin * scale
        deltas.append(d)
    return EctResult(h, tuple(deltas), bool(inconclusive))


@dataclass
class EctWindow:
    b: float
    grid: List[float]
    deltas: List[Tuple[float, float, float, float]]
    inconclusive: List[bool]


def ect_window(h_grid=None) -> EctWindow:
    """Empirical b: the first grid level where some Delta_k is conclusively non-negative (0 if none)."""
    if h_grid is None:
        h_grid = np.concatenate([-4.0 + np.geomspace(1e-4, 1e-2, 8)[:-1], np.linspace(-3.99, -0.01, 400)])
    results = [ect_determinants(h) for h in h_grid]
    b = 0.0
    for r in results:
        if not r.inconclusive and any(d >= 0 for d in r.deltas):
            b = r.h
            break
    return EctWindow(float(b), [float(x) for x in h_grid], [r.deltas for r in results],
                     [r.inconclusive for r in results])


# three-zero construction ----------------------------------------------------------------


@dataclass
class ThreeZeros:
    params: PerturbationParams
    targets: Tuple[float, float, float]
    report: ZeroReport
    singular_values: Tuple[float, ...]


def find_three_zeros(targets=(-3.98, -3.95, -3.9), window: float | None = None) -> ThreeZeros:
    """Parameters whose J vanishes at the three target levels.

    Solves J(h_i) = mu . (J_1..J_4)(h_i) = 0 for the one-dimensional kernel
    and verifies that the zeros found are exactly three simple ones.
    """
    t = tuple(float(x) for x in targets)
    if len(t) != 3 or not (t[0] < t[1] < t[2]):
        raise ValueError("targets must be three strictly increasing levels")
    for x in t:
        check_level(x)
    if window is not None and t[2] >= window:
        raise WindowTooLargeError(f"targets must lie below {window}")
    flow = default_flow()
    A = np.array([reduced_J(flow.frame(x)) for x in t])
    _, sv, vt = np.linalg.svd(A)
    mu = vt[-1]
    mu = mu / np.linalg.norm(mu)
    if mu[np.argmax(np.abs(mu))] < 0:
        mu = -mu
    params = PerturbationParams.from_mu(tuple(float(x) for x in mu))
    report = count_zeros(params)
    if report.count != 3 or not report.simple or report.suspects_unresolved:
        raise WindowTooLargeError(
            f"construction gave {report.count} zeros (simple={report.simple}); choose targets closer to -4"
        )
    return ThreeZeros(params, t, report, tuple(float(x) for x in sv))


# parameter scans -------------------------------------------------------------------------

# predicted maximum number of zeros per stratum (kappa normalised to 1 when nonzero)
STRATUM_BOUNDS = {
    "kappa0": 3,
    "kappa1_gamma_nonneg": 3,
    "kappa1_gamma_le_-26/7": 3,
    "kappa1_gamma_mid_f0_nonneg": 3,
    "kappa1_gamma_mid_f0_neg": 2,
}
# union view: gamma < 0 and f(0) < 0 forces an even count, hence at most two
NEGATIVE_VIEW = "kappa1_gamma_neg_f0_neg"

SAMPLE_MODES = ("uniform", "kappa0", "near_extremal")


def classify_stratum(greek, tol: float = 1e-12) -> str:
    g = np.asarray(greek, dtype=float)
    if abs(g[3]) <= tol * np.linalg.norm(g):
        return "kappa0"
    lam, _, gam, _ = g / g[3]
    if gam >= 0:
        return "kappa1_gamma_nonneg"
    if gam <= float(GAMMA_SPLIT):
        return "kappa1_gamma_le_-26/7"
    f0 = -16.0 * (lam + 6.0 * gam)
    return "kappa1_gamma_mid_f0_nonneg" if f0 >= 0 else "kappa1_gamma_mid_f0_neg"


def _in_negative_view(greek) -> bool:
    g = np.asarray(greek, dtype=float)
    if g[3] == 0:
        return False
    lam, _, gam, _ = g / g[3]
    return gam < 0 and -16.0 * (lam + 6.0 * gam) < 0


def _unit(v):
    return v / np.linalg.norm(v)


def _sample(mode: str, rng: np.random.Generator) -> np.ndarray:
    if mode == "uniform":
        return _unit(rng.standard_normal(4))
    if mode == "kappa0":
        return _unit(np.append(rng.standard_normal(3), 0.0))
    if mode == "near_extremal":
        # perturbation of a point with three prescribed zeros
        while True:
            t = np.sort(rng.uniform(-3.99, -0.01, 3))
            if np.min(np.diff(t)) > 0.02:
                break
        flow = default_flow()
        A = np.array([reduced_J(flow.frame(x)) for x in t])
        mu = np.linalg.svd(A)[2][-1]
        g = np.array(_matvec(L_MATRIX, mu), dtype=float)
        eta = 10.0 ** rng.uniform(-6.0, -2.0)
        return _unit(g * (1.0 + eta * rng.standard_normal(4)))
    raise ValueError(f"unknown sample mode {mode!r}")


def _scan_chunk(args):
    seed, chunk, mode, n, delta1, delta2 = args
    rng = np.random.Generator(np.random.Philox(seed).jumped(chunk))
    zc = zero_counter(delta1, delta2)
    out = []
    for _ in range(n):
        g = _sample(mode, rng)
        r = zc.count(g)
        out.append((tuple(float(x) for x in g), r.count, r.suspects_unresolved, r.parity_ok,
                    any(z.multiplicity_suspect for z in r.zeros)))
    return out


@dataclass
class StratumSummary:
    samples: int = 0
    max_count: int = 0
    histogram: dict = field(default_factory=dict)
    predicted_bound: int = 3
    violations: int = 0
    example_at_max: Optional[Tuple[float, ...]] = None

    def add(self, greek, count):
        self.samples += 1
        self.histogram[count] = self.histogram.get(count, 0) + 1
        if self.example_at_max is None or count > self.max_count:
            self.example_at_max = greek
            self.max_count = count
        if count > self.predicted_bound:
            self.violations += 1


@dataclass
class ScanReport:
    seed: int
    samples: dict
    strata: dict
    by_mode: dict
    global_max: int
    suspects_flagged: int
    suspects_unresolved: int
    parity_failures: int
    kappa0_count3_gamma_zero: int

    def as_dict(self) -> dict:
        d = asdict(self)
        for group in ("strata", "by_mode"):
            for v in d[group].values():
                v["histogram"] = {str(k): c for k, c in sorted(v["histogram"].items())}
        return d


def default_allocation(n_samples: int) -> dict:
    """Split of a sample budget over the sampling modes (60/20/20)."""
    u = int(round(0.6 * n_samples))
    k = int(round(0.2 * n_samples))
    return {"uniform": u, "kappa0": k, "near_extremal": n_samples - u - k}


def scan(n_samples: int = 10_000, seed: int = 20240531, allocation: dict | None = None,
         chunk_size: int = 250, jobs: int = 1, delta1: float = 1e-3, delta2: float = 1e-6) -> ScanReport:
    """Seeded stratified scan of zero counts over greek directions.

    Every sampling mode draws from its own Philox streams, one stream per chunk,
    so the result does not depend on ``jobs``.
    """
    alloc = default_allocation(n_samples) if allocation is None else dict(allocation)
    tasks = []
    for m_index, mode in enumerate(SAMPLE_MODES):
        n = alloc.get(mode, 0)
        for c, start in enumerate(range(0, n, chunk_size)):
            tasks.append((seed + m_index, c, mode, min(chunk_size, n - start), delta1, delta2))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_scan_chunk, tasks))
    else:
        chunks = [_scan_chunk(t) for t in tasks]

    strata = {k: StratumSummary(predicted_bound=b) for k, b in STRATUM_BOUNDS.items()}
    strata[NEGATIVE_VIEW] = StratumSummary(predicted_bound=2)
    by_mode = {m: StratumSummary(predicted_bound=3) for m in SAMPLE_MODES}
    flagged = unresolved = parity = k0g0 = 0
    for task, results in zip(tasks, chunks):
        mode = task[2]
        for g, count, unres, par_ok, sus in results:
            strata[classify_stratum(g)].add(g, count)
            if _in_negative_view(g):
                strata[NEGATIVE_VIEW].add(g, count)
            by_mode[mode].add(g, count)
            flagged += int(sus)
            unresolved += unres
            parity += int(not par_ok)
            if count == 3 and g[3] == 0 and g[2] == 0:
                k0g0 += 1
    return ScanReport(
        seed=seed,
        samples={m: alloc.get(m, 0) for m in SAMPLE_MODES},
        strata={k: asdict(v) for k, v in strata.items()},
        by_mode={k: asdict(v) for k, v in by_mode.items()},
        global_max=max(v.max_count for v in by_mode.values()),
        suspects_flagged=flagged,
        suspects_unresolved=unresolved,
        parity_failures=parity,
        kappa0_count3_gamma_zero=k0g0,
    )
