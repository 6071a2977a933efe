"""
Kinematic formulas on the 3-sphere
==================================

Geodesic balls, Crofton valuations by sampling great subspheres, and the
multiplicative coefficient table.
"""
import math

import numpy as np

from euler_kinematics import (BallCF, crofton_valuation, f_closed, mc_kinematic_s3, recover_d,
                              verify_m_table)
from euler_kinematics.sphere3 import default_grid, table_tensor

print("table rows, max residual on a 20x20 grid:", verify_m_table(default_grid(20, 20)))

T = recover_d(default_grid(15, 15))
print("recovered d^2_11 =", T[2, 1, 1], " pi^2/8 =", math.pi ** 2 / 8)
print("max deviation from the table:", np.abs(T.entries - table_tensor()).max())

ball = BallCF.ball([1, 0, 0, 0], 0.5)
for i in range(4):
    est, se = crofton_valuation(i, ball, 100_000, seed=7)
    print(f"  nu_{i}(B(0.5)) = {est:.5f} +- {se:.5f}   closed form {f_closed(i, 0.5):.5f}")

phi = BallCF.ball([1, 0, 0, 0], 0.3) + BallCF.ball([0, 1, 0, 0], 0.2, 2)
psi = BallCF.ball([0, 0, 1, 0], 0.4) + BallCF.ball([0.6, 0.8, 0, 0], 0.25, -1)
out = mc_kinematic_s3(phi, psi, 2, 200, 4000, seed=3)
print(f"SO(4) average of nu_2(phi * g psi): {out['lhs']:.5f} +- {out['se']:.5f}, table {out['rhs']:.5f}")
