"""
Identity-based evidence and the gamma root
==========================================

Repeat sightings tell us about community sizes directly.  Once the number
of collisions exceeds the number of observed communities the statistic
Y(t) exists.  Its second term is a relaxed maximum likelihood, reduced to
a single root gamma_0 of a decreasing scalar equation.
"""

import numpy as np

from mode_quest import GeometricPrior, solve_gamma0, t1_box_sum, y_stat
from mode_quest.identity import g1, is_active
from mode_quest.oracle import dense_gamma_scan

S, t = np.array([2, 1]), 10
print("active:", is_active(S, t), "(needs t >", S.sum() + np.count_nonzero(S), ")")

for gamma in (0.08, 0.09):
    print(f"g1({gamma}) = {g1(S, 0, 1, gamma)[0]:.4f}")
sol = solve_gamma0((S, t), 0, 1)
print(f"gamma0 = {sol.gamma0:.6f} after {sol.iterations} bisections, residual {sol.g_value:.1e}")
print("maximizer d* =", np.round(sol.d_star, 4))

(lo, hi), monotone, _ = dense_gamma_scan(S, 0, 1, t, points=10_000)
print(f"dense scan bracket ({lo:.5f}, {hi:.5f}), g decreasing: {monotone}")

# the box term grows with alpha; the prior tail decides how much
for q in (0.1, 0.9):
    vals = [t1_box_sum((S, t), alpha, GeometricPrior(q)) for alpha in (1, 2, 3)]
    print(f"q={q}: T1 for alpha=1,2,3 ->", np.round(vals, 4))

rep = y_stat((np.array([9, 5, 2, 0]), 40), alpha=1)
print("Y =", round(rep.y, 4), "declares community", rep.a_tilde + 1)
