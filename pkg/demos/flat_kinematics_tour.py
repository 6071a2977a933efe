"""
Rotation-averaged kinematic formula in the plane
================================================

Coefficients from Euclidean disks, then a Monte Carlo check on squares.
"""
import math

import numpy as np

from euler_kinematics import (ConvexPolytope, PolytopeCombination, evaluate_valuation,
                              flat_kinematic_tensor, rotation_average_convolution)

T = flat_kinematic_tensor(2)
print("c^2 coefficients:\n", np.round(T.entries[2], 10))
print("c^2_11 =", T[2, 1, 1], " 2/pi =", 2 / math.pi, " fit residual", T.residual)

square = PolytopeCombination([(1, ConvexPolytope([(0, 0), (1, 0), (0, 1), (1, 1)]))], 2)
v = np.array([evaluate_valuation(k, square) for k in range(3)])
predicted = T.apply(2, v, v)
est, se, info = rotation_average_convolution(square, square, 2, 2000, seed=1, workers=4)
print(f"area of square + rotated square: MC {est:.4f} +- {se:.4f}, predicted {predicted:.4f}")
