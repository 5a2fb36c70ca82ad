"""Tour of the linear minimization oracles.

Every feasible set in the library is touched only through
argmin_{v in C} <c, v>.  This script shows each closed form, checks the
assignment solver against exhaustive enumeration, and certifies the
strong convexity of the Euclidean ball by sampling.
"""

import numpy as np

from cgal import lmo
from cgal.problems import l2ball_set
from cgal.rng import Xoshiro256StarStar

rng = Xoshiro256StarStar(2718)

# Euclidean ball: v = -r c / ||c||
c = rng.normal_array(4)
print("l2 ball :", np.round(lmo.l2ball_lmo(c, r=1.0), 4))

# l_p ball, p = 4: the conjugate-exponent closed form
v = lmo.lpball_lmo(c, r=1.0, p=4.0)
print("l4 ball :", np.round(v, 4), " ||v||_4 =", round(np.linalg.norm(v, 4), 12))

# probability simplex and a box: vertex selections
print("simplex :", lmo.simplex_lmo(c))
print("box     :", lmo.box_lmo(c, -np.ones(4), np.ones(4)))

# Birkhoff polytope: a minimum-cost assignment
C = rng.uniform_array(25).reshape(5, 5)
P = lmo.birkhoff_lmo(C)
ref = lmo.brute_force_assignment(C)
print("assignment cost:", round(float(np.sum(C * P)), 12),
      " brute force:", round(ref.cost, 12))

# exhaustive cross-check on many random matrices
mismatches = 0
for _ in range(200):
    C = rng.uniform_array(36).reshape(6, 6)
    if abs(lmo.solve_assignment(C).cost - lmo.brute_force_assignment(C).cost) > 1e-12:
        mismatches += 1
print("6x6 cross-check mismatches:", mismatches, "/ 200")

# the unit ball is (1/2, 2)-uniformly convex; verify the supporting
# inequality <-u, vhat - v> >= (nu/2) ||vhat - v||^2 ||u|| by sampling
report = lmo.uniform_convexity_witness(l2ball_set(3), trials=5000, seed=31)
print(f"uniform convexity witness: {report.passes}/{report.trials} trials, "
      f"worst margin {report.worst_margin:.2e}")
