"""Count zeros of J, build a direction with three of them, look at the Wronskians.

    python demos/three_zeros.py
"""
import numpy as np

from triangle_cyclicity import cyclicity as cy

rng = np.random.Generator(np.random.Philox(2024))

# A random direction almost never has more than two zeros.
for _ in range(5):
    g = rng.standard_normal(4)
    rep = cy.count_zeros(g)
    print(f"greek = {np.round(g, 3)}  zeros = {rep.count}  at {[round(z.location, 4) for z in rep.zeros]}")

# Three zeros are forced by solving J(h_i) = 0 at three prescribed levels.
tz = cy.find_three_zeros((-3.5, -2.5, -1.5))
print("\nmu for zeros at -3.5, -2.5, -1.5:", np.round(tz.params.mu_array, 6))
print("verified zeros:", [round(z.location, 9) for z in tz.report.zeros])
print("singular values:", np.array(tz.singular_values))

# The sign of J between and beyond the zeros
hs = np.linspace(-3.95, -0.05, 14)
print("\n".join(f"  J({h:6.3f}) = {cy.J_eval(h, tz.params):+.3e}" for h in hs))

# Wronskian determinants of (J1, ..., J4) keep a fixed sign, which caps the
# number of zeros of any combination near the centre.
win = cy.ect_window()
d = np.array(win.deltas)
print(f"\nECT grid of {len(win.grid)} levels, {sum(win.inconclusive)} inconclusive, empirical b = {win.b}")
print("max Delta_k over the grid:", d.max(axis=0))
