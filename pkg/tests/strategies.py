"""Hypothesis strategies for small random constructible functions.

Coordinates are small integers so that every breakpoint is an integer
and half-integer probes see every stratum.
"""
from fractions import Fraction

from hypothesis import strategies as st

from euler_kinematics import ConvexPolytope, PolytopeCombination, from_polytopes

weights = st.integers(-2, 2).filter(bool)


@st.composite
def segment(draw, lo=-2, hi=3):
    a = draw(st.integers(lo, hi))
    b = draw(st.integers(a, hi))            # a == b gives a point
    return ConvexPolytope([(a,), (b,)])


@st.composite
def polygon(draw, lo=-1, hi=2):
    """Lattice point, segment, triangle or quadrilateral hull in the plane."""
    n = draw(st.integers(1, 4))
    pts = draw(st.lists(st.tuples(st.integers(lo, hi), st.integers(lo, hi)),
                        min_size=n, max_size=n, unique=True))
    return ConvexPolytope(pts)


@st.composite
def combination(draw, piece, max_terms=3):
    terms = draw(st.lists(st.tuples(weights, piece), min_size=1, max_size=max_terms))
    return PolytopeCombination(terms)


def cf1(max_terms=3):
    return combination(segment(), max_terms).map(lambda pc: (pc, from_polytopes(pc)))


def cf2(max_terms=2):
    return combination(polygon(), max_terms).map(lambda pc: (pc, from_polytopes(pc)))


def probes(lo, hi, denominator=2):
    """Rational probe points lo, lo + 1/denominator, ..., hi."""
    return [Fraction(k, denominator) for k in range(lo * denominator, hi * denominator + 1)]


@st.composite
def int_map(draw, m, n, lo=-1, hi=1):
    """Integer affine map R^n -> R^m with a nonzero linear part."""
    from euler_kinematics import AffineMap
    rows = draw(st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                         min_size=m, max_size=m).filter(lambda r: any(any(x) for x in r)))
    t = draw(st.lists(st.integers(-1, 1), min_size=m, max_size=m))
    return AffineMap(rows, t, source_dim=n)


# -- seeded generators (numpy RNG) for fixed-count property runs -----------------------

def random_pc1(rng, max_terms=3, lo=-2, hi=3):
    k = int(rng.integers(1, max_terms + 1))
    terms = []
    for _ in range(k):
        a, b = sorted(int(v) for v in rng.integers(lo, hi + 1, size=2))
        w = int(rng.choice([-2, -1, 1, 2]))
        terms.append((w, ConvexPolytope([(a,), (b,)])))
    return PolytopeCombination(terms, 1)


def random_pc2(rng, max_terms=2, lo=-1, hi=2):
    k = int(rng.integers(1, max_terms + 1))
    terms = []
    for _ in range(k):
        n = int(rng.integers(1, 5))
        pts = {tuple(int(c) for c in rng.integers(lo, hi + 1, size=2)) for _ in range(n)}
        w = int(rng.choice([-2, -1, 1, 2]))
        terms.append((w, ConvexPolytope(sorted(pts))))
    return PolytopeCombination(terms, 2)


def random_map(rng, m, n):
    from euler_kinematics import AffineMap
    while True:
        L = rng.integers(-1, 2, size=(m, n))
        if L.any():
            break
    t = rng.integers(-1, 2, size=m)
    return AffineMap(L.tolist(), t.tolist(), source_dim=n)
