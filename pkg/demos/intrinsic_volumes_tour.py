"""
Intrinsic volumes of polytopes
==============================

Face volumes weighted by external angles, checked against the volume of
a parallel body.
"""
import math

import numpy as np

from euler_kinematics import ConvexPolytope, PolytopeCombination, evaluate_valuation, intrinsic_volumes

cube = ConvexPolytope([(i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)])
print("unit cube V_0..V_3:", intrinsic_volumes(cube))

rng = np.random.default_rng(1)
P = ConvexPolytope([tuple(v) for v in rng.standard_normal((9, 3))])
v = intrinsic_volumes(P)
print("random polytope V_0..V_3:", np.round(v, 6))

# Steiner: vol(P + eps B) = V_3 + 2 eps V_2 + pi eps^2 V_1 + 4/3 pi eps^3
eps = 0.25
steiner = v[3] + 2 * eps * v[2] + math.pi * eps ** 2 * v[1] + 4 / 3 * math.pi * eps ** 3
print(f"Steiner volume of the {eps}-neighbourhood: {steiner:.6f}")

# valuations extend to integer combinations; a polygon boundary only sees V_1
def ngon_boundary(n, R):
    V = [(R * math.cos(2 * math.pi * j / n), R * math.sin(2 * math.pi * j / n)) for j in range(n)]
    terms = [(1, ConvexPolytope([V[j], V[(j + 1) % n]])) for j in range(n)]
    return PolytopeCombination(terms + [(-1, ConvexPolytope([p])) for p in V], 2)

small, big = ngon_boundary(64, 1.0), ngon_boundary(64, 2.0)
for k in range(3):
    print(f"  V_{k}:  2 * (radius 1) = {2 * evaluate_valuation(k, small):.12f}"
          f"   radius 2 = {evaluate_valuation(k, big):.12f}")
# every translation-invariant valuation agrees on the two, although the
# difference is not a sum of translation differences
