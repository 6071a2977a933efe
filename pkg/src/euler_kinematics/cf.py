"""Piecewise-linear constructible functions on R^n, n <= 3.

A :class:`StratifiedCF` is an integer weight on each relatively open simplex
of a geometric simplicial complex with exact rational vertices.  Its value
at x is the weight of the open simplex containing x (0 off the support).
"""
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import exact as ex
from .errors import (DegenerateSimplex, FaceClosureViolation, ImproperIntersection,
                     NonCompactSupport, ValidationError)
from .polytope import ConvexPolytope, vertex_enumeration

MAX_DIM = 3


def _faces_of(simplex):
    for k in range(1, len(simplex) + 1):
        yield from combinations(simplex, k)


class SimplicialComplex:
    """Vertices plus a face-closed set of sorted vertex-index tuples.

    Construction does not validate; use :func:`build_complex` for untrusted
    input. Float vertex coordinates are allowed only for complexes produced
    by rigid motions (combinatorics copied from an exact complex).
    """

    def __init__(self, ambient_dim, vertices, simplices):
        self.ambient_dim = int(ambient_dim)
        self.vertices = tuple(tuple(v) for v in vertices)
        self.simplices = frozenset(tuple(sorted(s)) for s in simplices)
        self.exact = all(isinstance(c, Fraction) for v in self.vertices for c in v)
        self._bary = {}

    def __eq__(self, other):
        return (isinstance(other, SimplicialComplex) and self.ambient_dim == other.ambient_dim
                and self.vertices == other.vertices and self.simplices == other.simplices)

    def __hash__(self):
        return hash((self.ambient_dim, self.vertices, self.simplices))

    def __repr__(self):
        return (f"SimplicialComplex(dim={self.ambient_dim}, {len(self.vertices)} vertices, "
                f"{len(self.simplices)} simplices)")

    def points(self, simplex):
        return [self.vertices[i] for i in simplex]

    def maximal_simplices(self):
        by_vertex = {}
        for s in self.simplices:
            for v in s:
                by_vertex.setdefault(v, []).append(s)
        out = []
        for s in self.simplices:
            ss = set(s)
            if not any(len(t) > len(s) and ss <= set(t) for t in by_vertex[s[0]]):
                out.append(s)
        return sorted(out)

    def polytope(self, simplex):
        return ConvexPolytope(self.points(simplex))

    def in_open_simplex(self, simplex, x):
        """Exact barycentric test: is x in the relative interior of ``simplex``?"""
        if not self.exact:
            return self._in_open_simplex_float(simplex, x)
        pts = self.points(simplex)
        v0 = pts[0]
        d = len(pts) - 1
        if d == 0:
            return tuple(x) == v0
        data = self._bary.get(simplex)
        if data is None:
            cols = [ex.sub(p, v0) for p in pts[1:]]
            # choose d independent coordinate rows of the n x d matrix
            rows = [tuple(c[i] for c in cols) for i in range(self.ambient_dim)]
            _, piv = ex.rref([list(r) for r in zip(*rows)], self.ambient_dim)
            A = [rows[i] for i in piv]
            inv = []
            for j in range(d):
                e = [Fraction(int(i == j)) for i in range(d)]
                inv.append(ex.solve_square(A, e))
            # inv[j] is column j of A^{-1}
            data = (cols, piv, inv)
            self._bary[simplex] = data
        cols, piv, inv = data
        y = ex.sub(x, v0)
        rhs = [y[i] for i in piv]
        lam = [sum(inv[j][i] * rhs[j] for j in range(d)) for i in range(d)]
        if any(l <= 0 for l in lam) or sum(lam) >= 1:
            return False
        recon = tuple(sum(lam[j] * cols[j][i] for j in range(d)) for i in range(self.ambient_dim))
        return recon == tuple(y)

    def _in_open_simplex_float(self, simplex, x, tol=1e-9):
        P = np.asarray(self.points(simplex), dtype=float)
        x = np.asarray(x, dtype=float)
        if len(P) == 1:
            return bool(np.allclose(P[0], x, atol=tol))
        M = (P[1:] - P[0]).T
        lam, *_ = np.linalg.lstsq(M, x - P[0], rcond=None)
        if np.abs(M @ lam - (x - P[0])).max() > tol:
            return False
        return bool(lam.min() > tol and lam.sum() < 1 - tol)


def _check_proper(cx, s, t):
    """Closed simplices s, t must meet exactly in the face spanned by shared vertices."""
    ps, pt = cx.polytope(s), cx.polytope(t)
    eqs = list(ps.equalities) + list(pt.equalities)
    ineqs = [(a, b) for a, b, _ in ps.facets] + [(a, b) for a, b, _ in pt.facets]
    verts, _ = vertex_enumeration(eqs, ineqs, cx.ambient_dim)
    shared = sorted(cx.vertices[i] for i in set(s) & set(t))
    return sorted(verts) == shared


def build_complex(ambient_dim, vertices, simplices):
    """Validated :class:`SimplicialComplex` from raw coordinates and index tuples.

    Raises FaceClosureViolation, ImproperIntersection or DegenerateSimplex.
    """
    if ambient_dim not in (0, 1, 2, 3):
        raise ValidationError(f"ambient dimension {ambient_dim} outside 0..3")
    verts = []
    for v in vertices:
        if len(v) != ambient_dim:
            raise ValidationError(f"vertex {v!r} has arity {len(v)}, expected {ambient_dim}")
        verts.append(ex.point(v))
    if len(set(verts)) != len(verts):
        raise ValidationError("duplicate vertices")
    simps = set()
    for s in simplices:
        s = tuple(sorted(int(i) for i in s))
        if not s or len(set(s)) != len(s):
            raise ValidationError(f"bad simplex {s!r}")
        if s[0] < 0 or s[-1] >= len(verts):
            raise ValidationError(f"simplex {s!r} references a missing vertex")
        if len(s) - 1 > ambient_dim:
            raise DegenerateSimplex(f"simplex {s!r} exceeds ambient dimension")
        simps.add(s)
    for s in simps:
        for f in _faces_of(s):
            if f not in simps:
                raise FaceClosureViolation(f"face {f} of simplex {s} is not listed")
    cx = SimplicialComplex(ambient_dim, verts, simps)
    for s in simps:
        if ex.affine_rank(cx.points(s)) != len(s) - 1:
            raise DegenerateSimplex(f"simplex {s} has affinely dependent vertices")
    maximal = cx.maximal_simplices()
    boxes = {}
    for s in maximal:
        P = cx.points(s)
        boxes[s] = (tuple(map(min, zip(*P))), tuple(map(max, zip(*P))))
    for s, t in combinations(maximal, 2):
        (lo1, hi1), (lo2, hi2) = boxes[s], boxes[t]
        if any(h1 < l2 or h2 < l1 for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2)):
            continue
        if not _check_proper(cx, s, t):
            raise ImproperIntersection(f"simplices {s} and {t} meet off a common face")
    return cx


class StratifiedCF:
    """Integer combination of relatively open simplices: sum m_s 1_s."""

    def __init__(self, complex, weights):
        self.complex = complex
        w = {}
        for s, m in dict(weights).items():
            s = tuple(sorted(s))
            if s not in complex.simplices:
                raise ValidationError(f"weight on unknown simplex {s}")
            if int(m) != m:
                raise ValidationError("weights must be integers")
            w[s] = int(m)
        self.weights = w

    @property
    def ambient_dim(self):
        return self.complex.ambient_dim

    def __repr__(self):
        nz = sum(1 for m in self.weights.values() if m)
        return f"StratifiedCF(dim={self.ambient_dim}, {nz} weighted simplices)"

    def __call__(self, x):
        return evaluate(self, x)

    def is_zero(self):
        return all(m == 0 for m in self.weights.values())

    def weighted_items(self):
        return sorted((s, m) for s, m in self.weights.items() if m)


def zero_cf(ambient_dim):
    return StratifiedCF(SimplicialComplex(ambient_dim, [], []), {})


def indicator(points, ambient_dim=None):
    """Indicator of a closed simplex given by its affinely independent vertices."""
    pts = sorted({ex.point(p) for p in points})
    n = len(pts[0]) if ambient_dim is None else ambient_dim
    if ex.affine_rank(pts) != len(pts) - 1:
        raise DegenerateSimplex("indicator() needs affinely independent vertices")
    full = tuple(range(len(pts)))
    simps = list(_faces_of(full))
    cx = SimplicialComplex(n, pts, simps)
    return StratifiedCF(cx, {s: 1 for s in simps})


def canonicalize(cf):
    """Drop zero weights and every simplex that is not a face of a weighted one."""
    weighted = [(s, m) for s, m in cf.weights.items() if m != 0]
    keep = set()
    for s, _ in weighted:
        keep.update(_faces_of(s))
    used = sorted({i for s in keep for i in s}, key=lambda i: cf.complex.vertices[i])
    remap = {old: new for new, old in enumerate(used)}
    verts = [cf.complex.vertices[i] for i in used]
    simps = [tuple(sorted(remap[i] for i in s)) for s in keep]
    cx = SimplicialComplex(cf.ambient_dim, verts, simps)
    w = {tuple(sorted(remap[i] for i in s)): m for s, m in weighted}
    if cx == cf.complex and w == cf.weights:
        return cf
    return StratifiedCF(cx, w)


def evaluate(cf, x):
    """Value of ``cf`` at the point ``x`` (exact unless the complex is float)."""
    if len(x) != cf.ambient_dim:
        raise ValidationError(f"point arity {len(x)} != ambient dimension {cf.ambient_dim}")
    cx = cf.complex
    if cx.exact:
        x = ex.point(x)
    for s, m in cf.weights.items():
        if m and cx.in_open_simplex(s, x):
            return m
    return 0


def euler_integral(cf):
    """Integral with respect to Euler characteristic: sum m_s (-1)^dim s."""
    if isinstance(cf, PolytopeCombination):
        return sum(m for m, _ in cf.terms)
    total = 0
    for s, m in cf.weights.items():
        if not m:
            continue
        if len(s) - 1 > cf.ambient_dim:
            raise NonCompactSupport("cell of excess dimension")
        total += m * (-1) ** (len(s) - 1)
    return total


class PolytopeCombination:
    """Integer combination of closed convex polytope indicators."""

    def __init__(self, terms, ambient_dim=None):
        terms = [(int(m), P) for m, P in terms]
        dims = {P.ambient_dim for _, P in terms}
        if ambient_dim is not None:
            dims.add(ambient_dim)
        if len(dims) > 1:
            raise ValidationError("polytopes of different ambient dimension")
        self.terms = tuple(terms)
        self.ambient_dim = dims.pop() if dims else None

    def __repr__(self):
        return f"PolytopeCombination({len(self.terms)} terms)"

    def __call__(self, x):
        return sum(m for m, P in self.terms if P.contains(x))

    def simplified(self):
        acc = {}
        order = []
        for m, P in self.terms:
            if P not in acc:
                acc[P] = 0
                order.append(P)
            acc[P] += m
        return PolytopeCombination([(acc[P], P) for P in order if acc[P]], self.ambient_dim)

    def scaled(self, c):
        return PolytopeCombination([(c * m, P) for m, P in self.terms], self.ambient_dim)

    def __add__(self, other):
        return PolytopeCombination(list(self.terms) + list(other.terms), self.ambient_dim)

    def rigid_motion(self, R, t):
        return PolytopeCombination([(m, P.rigid_motion(R, t)) for m, P in self.terms],
                                   self.ambient_dim)

    @property
    def exact(self):
        return all(P.exact for _, P in self.terms)
