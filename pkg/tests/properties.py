"""Euler-calculus identities as boolean checks on concrete instances.

Shared by the hypothesis suites and the fixed-count acceptance run.
All comparisons are exact (integer weights, rational coordinates).
"""
from euler_kinematics import (ConvexPolytope, cf_equal, compose, convolve, euler_integral,
                              indicator, pointwise_product, pullback, pushforward)

WINDOW2 = ConvexPolytope([(-3, -3), (4, -3), (-3, 4), (4, 4)])   # contains every test support


def fubini(phi, f):
    return euler_integral(pushforward(phi, f)) == euler_integral(phi)


def projection_formula(phi, psi, f):
    """f_*(phi . f^*psi) == f_*phi . psi; the window covers supp phi."""
    lhs = pushforward(pointwise_product(phi, pullback(psi, f, window=WINDOW2)), f)
    rhs = pointwise_product(pushforward(phi, f), psi)
    return cf_equal(lhs, rhs)


def functoriality(phi, f, g):
    return cf_equal(pushforward(phi, compose(g, f)), pushforward(pushforward(phi, f), g))


def commutative(a, b):
    return cf_equal(convolve(a, b), convolve(b, a))


def associative(a, b, c):
    return cf_equal(convolve(convolve(a, b), c), convolve(a, convolve(b, c)))


def unit(a):
    delta = indicator([(0,) * a.ambient_dim])
    return cf_equal(convolve(a, delta), a)


def bilinear_matches_brute_force(a, b):
    return cf_equal(convolve(a, b, "convex_bilinear"), convolve(a, b, "brute_force"))
