"""Sheaf-style operations: exterior product, pullback, slice, pushforward, convolution."""
from fractions import Fraction

import numpy as np

from . import exact as ex
from .cf import (PolytopeCombination, SimplicialComplex, StratifiedCF, canonicalize,
                 zero_cf)
from .core import from_polytopes, to_polytope_combination
from .errors import DimensionCapExceeded, NotOrthogonal, ValidationError
from .polytope import ConvexPolytope, minkowski_sum, vertex_enumeration
from .refine import cells_to_cf, complex_to_cf

CONVEX_BILINEAR = "convex_bilinear"
BRUTE_FORCE = "brute_force"


class AffineMap:
    """x -> L x + t from R^source_dim to R^target_dim, exact rational entries."""

    def __init__(self, linear, translation=None, source_dim=None):
        rows = [tuple(ex.frac(c) for c in r) for r in linear]
        if source_dim is None:
            if not rows:
                raise ValidationError("source_dim required for a map onto R^0")
            source_dim = len(rows[0])
        if any(len(r) != source_dim for r in rows):
            raise ValidationError("ragged linear part")
        self.source_dim = int(source_dim)
        self.target_dim = len(rows)
        self.linear = tuple(rows)
        if translation is None:
            translation = [0] * self.target_dim
        self.translation = ex.point(translation)
        if len(self.translation) != self.target_dim:
            raise ValidationError("translation arity does not match the target dimension")
        self.rank = ex.rank(list(self.linear), self.source_dim)
        self.surjective = self.rank == self.target_dim
        self.injective = self.rank == self.source_dim

    def __call__(self, x):
        return tuple(ex.dot(r, x) + t for r, t in zip(self.linear, self.translation))

    def __repr__(self):
        return f"AffineMap(R^{self.source_dim} -> R^{self.target_dim}, rank {self.rank})"

    def pull_functional(self, a, b):
        """(a', b') with a'.x - b' == a.f(x) - b."""
        a2 = tuple(sum(a[i] * self.linear[i][j] for i in range(self.target_dim))
                   for j in range(self.source_dim))
        return a2, b - ex.dot(a, self.translation)

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)], source_dim=n)


def compose(g, f):
    """g o f."""
    if g.source_dim != f.target_dim:
        raise ValidationError("maps are not composable")
    lin = [[sum(g.linear[i][k] * f.linear[k][j] for k in range(f.target_dim))
            for j in range(f.source_dim)] for i in range(g.target_dim)]
    return AffineMap(lin, g(f.translation), source_dim=f.source_dim)


class AffineSubspace:
    """base + span(basis) inside R^ambient_dim."""

    def __init__(self, base_point, direction_basis):
        self.base_point = ex.point(base_point)
        self.ambient_dim = len(self.base_point)
        self.direction_basis = tuple(ex.point(v) for v in direction_basis)
        if ex.rank(list(self.direction_basis), self.ambient_dim) != len(self.direction_basis):
            raise ValidationError("direction basis is linearly dependent")

    @property
    def dim(self):
        return len(self.direction_basis)

    def as_map(self):
        """Parametrisation R^dim -> R^ambient_dim."""
        lin = [[v[i] for v in self.direction_basis] for i in range(self.ambient_dim)]
        return AffineMap(lin, self.base_point, source_dim=self.dim)

    def point(self, coords):
        return self.as_map()(ex.point(coords))


# -- exterior product -----------------------------------------------------------

def exterior_product(phi, psi):
    """(phi [x] psi)(x, y) = phi(x) psi(y) on R^(a+b)."""
    a, b = phi.ambient_dim, psi.ambient_dim
    if a + b > 3:
        raise DimensionCapExceeded(f"exterior product lands in R^{a + b}")
    phi, psi = canonicalize(phi), canonicalize(psi)
    if phi.is_zero() or psi.is_zero():
        return zero_cf(a + b)
    cells = []
    for s in phi.complex.simplices:
        ps = phi.complex.points(s)
        ws = phi.weights.get(s, 0)
        for t in psi.complex.simplices:
            pt = psi.complex.points(t)
            verts = [x + y for x in ps for y in pt]
            cells.append((ws * psi.weights.get(t, 0), verts))
    return canonicalize(complex_to_cf(a + b, cells))


# -- pullback / slice -----------------------------------------------------------------

def pullback(psi, f, window=None):
    """(psi o f) * 1_window on R^source_dim.

    ``window`` (a bounded exact ConvexPolytope) may be omitted only when f
    is injective, in which case every preimage cell is already bounded.
    """
    if psi.ambient_dim != f.target_dim:
        raise ValidationError("map target does not match the function's space")
    if window is None and not f.injective:
        raise ValidationError("pullback along a non-injective map needs a bounded window")
    n = f.source_dim
    psi = canonicalize(psi)
    if psi.is_zero():
        return zero_cf(n)
    if window is not None:
        if window.ambient_dim != n or not window.exact:
            raise ValidationError("window must be an exact polytope in the source space")
        win_faces = window.faces()
    else:
        win_faces = [None]
    cells = []
    for s in psi.complex.simplices:
        P = psi.complex.polytope(s)
        eqs0 = [f.pull_functional(a, b) for a, b in P.equalities]
        strict0 = [f.pull_functional(a, b) for a, b, _ in P.facets]
        for F in win_faces:
            eqs, strict = list(eqs0), list(strict0)
            if F is not None:
                eqs += list(F.equalities)
                strict += [(a, b) for a, b, _ in F.facets]
            verts, _ = vertex_enumeration(eqs, strict, n)
            if not verts:
                continue
            c = ex.centroid(verts)
            if all(ex.dot(a, c) > b for a, b in strict):
                cells.append((psi.weights.get(s, 0), verts))
    if not cells:
        return zero_cf(n)
    return canonicalize(complex_to_cf(n, cells))


def slice_cf(cf, subspace):
    """Restriction of ``cf`` to an affine subspace, in the subspace's own coordinates."""
    if subspace.ambient_dim != cf.ambient_dim:
        raise ValidationError("subspace lives in a different ambient space")
    return pullback(cf, subspace.as_map())


# -- pushforward ------------------------------------------------------------------------

def pushforward(phi, f):
    """Fiberwise Euler integral: (f_* phi)(y) = sum over fibers of chi.

    Each open simplex s maps onto relint f(s) with fibers of dimension
    dim s - dim f(s), so f_* 1_s = (-1)^(dim s - dim f(s)) 1_{relint f(s)}.
    """
    if phi.ambient_dim != f.source_dim:
        raise ValidationError("map source does not match the function's space")
    m = f.target_dim
    if m > 3:
        raise DimensionCapExceeded("pushforward target capped at R^3")
    cells = {}
    order = []
    cx = phi.complex
    for s, w in phi.weighted_items():
        P = ConvexPolytope([f(p) for p in cx.points(s)]) if m else ConvexPolytope([()])
        sign = (-1) ** (len(s) - 1 - P.dim)
        if P not in cells:
            cells[P] = 0
            order.append(P)
        cells[P] += sign * w
    group = [(cells[P], P, False) for P in order if cells[P]]
    if not group:
        return zero_cf(m)
    _, (out,) = cells_to_cf(m, [group])
    return canonicalize(out)


# -- convolution --------------------------------------------------------------------------

def _as_combination(x):
    if isinstance(x, PolytopeCombination):
        return x
    return to_polytope_combination(x)


def convolve_combinations(pc1, pc2):
    """sum m_i n_j 1_{P_i + Q_j}; valid since 1_P * 1_Q = 1_{P+Q} for convex P, Q."""
    terms = [(m * k, minkowski_sum(P, Q)) for m, P in pc1.terms for k, Q in pc2.terms]
    return PolytopeCombination(terms, pc1.ambient_dim or pc2.ambient_dim).simplified()


def addition_map(n):
    return AffineMap([[int(j == i) for j in range(n)] + [int(j == i) for j in range(n)]
                      for i in range(n)], source_dim=2 * n)


def convolve(phi, psi, method=CONVEX_BILINEAR):
    """Convolution phi * psi = a_*(phi [x] psi), a = addition.

    ``convex_bilinear`` expands both sides into convex indicators and sums
    Minkowski sums; float inputs give a float PolytopeCombination.
    ``brute_force`` literally pushes the exterior product forward and needs
    R^1 inputs to stay inside the dimension cap.
    """
    if method == CONVEX_BILINEAR:
        pc = convolve_combinations(_as_combination(phi), _as_combination(psi))
        if not pc.exact:
            return pc
        if not pc.terms:
            n = phi.ambient_dim if phi.ambient_dim is not None else psi.ambient_dim
            return zero_cf(n or 0)
        return from_polytopes(pc)
    if method == BRUTE_FORCE:
        if isinstance(phi, PolytopeCombination):
            phi = from_polytopes(phi)
        if isinstance(psi, PolytopeCombination):
            psi = from_polytopes(psi)
        n = phi.ambient_dim
        if psi.ambient_dim != n:
            raise ValidationError("convolution of functions on different spaces")
        if 2 * n > 3:
            raise DimensionCapExceeded("brute-force convolution needs R^1 inputs")
        return pushforward(exterior_product(phi, psi), addition_map(n))
    raise ValidationError(f"unknown convolution method {method!r}")


# -- rigid motions --------------------------------------------------------------------------

def check_orthogonal(R, tol=1e-12):
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise NotOrthogonal("rotation must be a square matrix")
    err = np.abs(R.T @ R - np.eye(len(R))).max()
    if err > tol:
        raise NotOrthogonal(f"|R^T R - I| = {err:.3g} exceeds {tol:g}")
    return R


def rigid_motion_apply(R, t, cf):
    """g_* cf for g(x) = R x + t; float coordinates, combinatorics unchanged."""
    R = check_orthogonal(R)
    t = np.zeros(len(R)) if t is None else np.asarray(t, dtype=float)
    if isinstance(cf, PolytopeCombination):
        return cf.rigid_motion(R, t)
    cx = cf.complex
    if len(R) != cf.ambient_dim:
        raise ValidationError("rotation size does not match the ambient dimension")
    if np.array_equal(R, np.eye(len(R))) and not t.any():
        return cf
    V = np.asarray(cx.vertices, dtype=float).reshape(len(cx.vertices), cf.ambient_dim)
    V = V @ R.T + t
    moved = SimplicialComplex(cf.ambient_dim, [tuple(map(float, v)) for v in V], cx.simplices)
    return StratifiedCF(moved, cf.weights)
