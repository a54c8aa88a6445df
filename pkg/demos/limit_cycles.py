"""Follow orbits of the perturbed triangle system and count limit cycles.

Shows the section displacement for the three-zero direction of J, and the
same experiment with the leading displacement measured from orbits.

    python demos/limit_cycles.py
"""
import numpy as np

from triangle_cyclicity import cyclicity as cy
from triangle_cyclicity import quadrature as qd
from triangle_cyclicity import simulate as sm

targets = (-3.5, -2.5, -1.5)

# One revolution of an unperturbed orbit returns to its starting point.
r = sm.poincare_return(-2.0, sm.EpsVector())
print(f"unperturbed: period {r.period:.6f}, closure {r.closure:.1e}")

# With eps0 only, the displacement is eps0 J1 to first order and never vanishes.
e = sm.EpsVector(1e-4)
print(f"eps0 = 1e-4: displacement/eps0 = {sm.displacement(-2.0, e) / 1e-4:.6f}, J1 = {qd.original_J(1, -2.0):.6f}")

# The direction with three zeros of J, mapped to eps in closed form.
tz = cy.find_three_zeros(targets)
for delta in (1e-2, 1e-3):
    eps = sm.eps_from_mu(tz.params.mu_array, delta)
    cc = sm.count_cycles(eps)
    print(f"J direction, delta = {delta:g}: eps = {np.round(eps.values, 6)}  cycles = {cc.count} {cc.levels}")

# Measure the leading displacement coefficients from orbits and redo the construction.
cb = sm.calibrate()
levels = cb.levels[[0, 5, 10]]
M = cb(levels)
J = np.array([[qd.original_J(k, h) for k in (1, 2, 3, 4)] for h in levels])
print("\nmeasured coefficients vs (-J1, J2, J3/2, J4):")
for h, m, j in zip(levels, M, J):
    print(f"  h = {h:6.3f}  {np.round(m, 6)}  {np.round([-j[0], j[1], j[2] / 2, j[3]], 6)}")

mu = cb.direction_for_zeros(targets)
for delta in (1e-2, 1e-3):
    cc = sm.count_cycles(sm.eps_from_mu(mu, delta))
    print(f"measured direction, delta = {delta:g}: cycles = {cc.count} at {np.round(cc.levels, 4)}")
