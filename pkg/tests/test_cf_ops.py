from fractions import Fraction as F

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from euler_kinematics import (AffineMap, AffineSubspace, ConvexPolytope, PolytopeCombination,
                              cf_equal, convolve, euler_integral, exterior_product,
                              from_polytopes, indicator, polytope_indicator, pullback,
                              pushforward, rigid_motion_apply, slice_cf)
from euler_kinematics.errors import DimensionCapExceeded, NotOrthogonal, ValidationError
from euler_kinematics.ops import BRUTE_FORCE

import properties as prop
from oracles import pc_pushforward_value, pc_value
from strategies import cf1, cf2, int_map, probes

SUITE = settings(max_examples=200, deadline=None, derandomize=True)
FEW = settings(max_examples=30, deadline=None, derandomize=True)

UNIT_SQUARE = ConvexPolytope([(0, 0), (1, 0), (0, 1), (1, 1)])


def square_boundary():
    sq = PolytopeCombination([(1, UNIT_SQUARE)])
    # closed square minus open square = boundary
    edges = [ConvexPolytope(e) for e in ([(0, 0), (1, 0)], [(1, 0), (1, 1)],
                                         [(1, 1), (0, 1)], [(0, 1), (0, 0)])]
    corners = [ConvexPolytope([c]) for c in [(0, 0), (1, 0), (1, 1), (0, 1)]]
    return from_polytopes(PolytopeCombination([(1, e) for e in edges] + [(-1, c) for c in corners]))


# -- worked examples ---------------------------------------------------------------

def test_projecting_square_boundary():
    f = AffineMap([[1, 0]])
    out = pushforward(square_boundary(), f)
    assert out((F(0),)) == 1 and out((F(1),)) == 1
    assert out((F(1, 2),)) == 2
    assert out((F(2),)) == 0
    assert euler_integral(out) == 0


def test_pushforward_to_point():
    f = AffineMap([], source_dim=2)
    assert pushforward(square_boundary(), f).is_zero()
    assert pushforward(polytope_indicator(UNIT_SQUARE), f)(()) == 1


def test_exterior_product_of_intervals_is_square():
    u = indicator([(0,), (1,)])
    assert cf_equal(exterior_product(u, u), polytope_indicator(UNIT_SQUARE))


def test_exterior_product_cap():
    sq = polytope_indicator(UNIT_SQUARE)
    with pytest.raises(DimensionCapExceeded):
        exterior_product(sq, sq)


def test_pullback_sum_map():
    # preimage of {0} under x + y, restricted to the unit square, is the origin
    f = AffineMap([[1, 1]])
    at0 = pullback(indicator([(0,)]), f, window=UNIT_SQUARE)
    assert at0((F(0), F(0))) == 1 and euler_integral(at0) == 1
    assert at0((F(1, 2), F(-1, 2))) == 0
    # preimage of {1} is the anti-diagonal segment
    at1 = pullback(indicator([(1,)]), f, window=UNIT_SQUARE)
    assert at1((F(1, 2), F(1, 2))) == 1 and at1((F(1), F(0))) == 1
    assert euler_integral(at1) == 1


def test_pullback_needs_window():
    with pytest.raises(ValidationError):
        pullback(indicator([(0,)]), AffineMap([[1, 1]]))


def test_slice_square_at_half():
    line = AffineSubspace([F(1, 2), 0], [[0, 1]])
    s = slice_cf(polytope_indicator(UNIT_SQUARE), line)
    assert cf_equal(s, indicator([(0,), (1,)]))


def test_convolution_examples():
    u = indicator([(0,), (1,)])
    two_points = from_polytopes(PolytopeCombination([(1, ConvexPolytope([(0,)])),
                                                     (1, ConvexPolytope([(1,)]))]))
    out = convolve(two_points, u)
    assert [out((x,)) for x in probes(-1, 3)] == [0, 0, 1, 1, 2, 1, 1, 0, 0]
    assert cf_equal(out, convolve(two_points, u, BRUTE_FORCE))


def test_brute_force_dimension_cap():
    sq = polytope_indicator(UNIT_SQUARE)
    with pytest.raises(DimensionCapExceeded):
        convolve(sq, sq, BRUTE_FORCE)


def test_rigid_motion_rejects_non_orthogonal():
    with pytest.raises(NotOrthogonal):
        rigid_motion_apply(np.array([[1.0, 0.1], [0.0, 1.0]]), None, polytope_indicator(UNIT_SQUARE))


def test_rigid_motion_keeps_euler_integral():
    c, s = np.cos(0.3), np.sin(0.3)
    moved = rigid_motion_apply(np.array([[c, -s], [s, c]]), [1.0, 2.0], square_boundary())
    assert euler_integral(moved) == 0


# -- pushforward against an independent fibre count --------------------------------------

@FEW
@given(cf2(), int_map(1, 2))
def test_pushforward_pointwise(a, f):
    pa, A = a
    out = pushforward(A, f)
    for y in probes(-6, 6):
        assert out((y,)) == pc_pushforward_value(pa, f, (y,))


@FEW
@given(cf1(), cf1())
def test_convolution_pointwise(a, b):
    (pa, A), (pb, B) = a, b
    out = convolve(A, B)
    # 1_[a,b] * 1_[c,d] = 1_[a+c, b+d]
    sums = PolytopeCombination([(m * k, ConvexPolytope([(P.vertices[0][0] + Q.vertices[0][0],),
                                                        (P.vertices[-1][0] + Q.vertices[-1][0],)]))
                                for m, P in pa.terms for k, Q in pb.terms], 1)
    for x in probes(-5, 7):
        assert out((x,)) == pc_value(sums, (x,))


# -- identity suites (200 instances each) ---------------------------------------------------

@SUITE
@given(cf2(), int_map(1, 2))
def test_fubini(a, f):
    assert prop.fubini(a[1], f)


@SUITE
@given(cf2(), cf1(), int_map(1, 2))
def test_projection_formula(a, b, f):
    assert prop.projection_formula(a[1], b[1], f)


@SUITE
@given(cf2(), int_map(2, 2), int_map(1, 2))
def test_pushforward_functoriality(a, f, g):
    assert prop.functoriality(a[1], f, g)


@SUITE
@given(cf1(), cf1())
def test_convolution_commutes(a, b):
    assert prop.commutative(a[1], b[1])


@SUITE
@given(cf1(), cf1(), cf1())
def test_convolution_associates(a, b, c):
    assert prop.associative(a[1], b[1], c[1])


@SUITE
@given(st.one_of(cf1(), cf2()))
def test_convolution_unit(a):
    assert prop.unit(a[1])


@SUITE
@given(cf1(), cf1())
def test_bilinear_equals_brute_force(a, b):
    assert prop.bilinear_matches_brute_force(a[1], b[1])
