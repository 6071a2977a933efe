"""
Euler calculus on piecewise-linear functions
============================================

Integer-valued functions that are constant on the cells of a
triangulation, integrated against the Euler characteristic.
"""
from fractions import Fraction as F

from euler_kinematics import (AffineMap, ConvexPolytope, PolytopeCombination, convolve,
                              euler_integral, from_polytopes, indicator, pushforward)

# the closed unit interval: two points and one open edge, each weighted 1
u = indicator([(0,), (1,)])
print("chi of [0,1]:", euler_integral(u))

# a closed square minus its open interior is the boundary circle, chi = 0
square = ConvexPolytope([(0, 0), (1, 0), (0, 1), (1, 1)])
edges = [ConvexPolytope(e) for e in ([(0, 0), (1, 0)], [(1, 0), (1, 1)],
                                     [(1, 1), (0, 1)], [(0, 1), (0, 0)])]
corners = [ConvexPolytope([c]) for c in [(0, 0), (1, 0), (1, 1), (0, 1)]]
boundary = from_polytopes(PolytopeCombination([(1, e) for e in edges] + [(-1, c) for c in corners]))
print("chi of the square's boundary:", euler_integral(boundary))

# pushing forward along x -> x integrates chi over vertical fibres:
# two points over (0,1), a whole edge over each endpoint
proj = AffineMap([[1, 0]])
shadow = pushforward(boundary, proj)
for x in (F(0), F(1, 2), F(1)):
    print(f"  fibre chi at x = {x}: {shadow((x,))}")

# convolution replaces Minkowski sum: {0, 1} * [0, 1] is 1 on [0,2] and 2 at x = 1
two_points = from_polytopes(PolytopeCombination([(1, ConvexPolytope([(0,)])),
                                                 (1, ConvexPolytope([(1,)]))]))
smeared = convolve(two_points, u)
print("({0,1} * [0,1]) on a half-integer grid:",
      [smeared((F(k, 2),)) for k in range(-1, 6)])
print("same via pushforward of the exterior product:",
      [convolve(two_points, u, "brute_force")((F(k, 2),)) for k in range(-1, 6)])
