"""Vertex-represented convex polytopes in R^n, n <= 3.

A polytope is either *exact* (Fraction coordinates, exact predicates) or
*float* (tolerance-based predicates). Construction always runs a hull so
that the stored vertices are exactly the extreme points; both kinds carry
an H-representation: equalities ``a.x == b`` cutting out the affine hull
and inward facet inequalities ``a.x >= b``.
"""
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm

import numpy as np
from scipy.spatial import ConvexHull

from . import exact as ex
from .errors import ValidationError

FLOAT_TOL = 1e-9


# -- exact hull ---------------------------------------------------------------

def _chain_2d(pts, cross, strict_turn):
    """Andrew's monotone chain. Returns CCW indices of extreme points."""
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    if len(order) == 1:
        return order

    def half(seq):
        out = []
        for i in seq:
            while len(out) >= 2 and not strict_turn(cross(pts[out[-2]], pts[out[-1]], pts[i])):
                out.pop()
            out.append(i)
        return out

    lower = half(order)
    upper = half(reversed(order))
    return lower[:-1] + upper[:-1]


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _exact_facets_3d(Y):
    """Facets of a full-dimensional exact point set in R^3.

    Brute force over point triples, on integer-scaled coordinates.
    Returns a list of (inward normal, offset, indices on the facet plane).
    """
    den = 1
    for y in Y:
        for c in y:
            den = lcm(den, c.denominator)
    Z = [tuple(int(c * den) for c in y) for y in Y]
    n = len(Z)
    seen = set()
    facets = []
    for i, j, k in combinations(range(n), 3):
        a = [Z[j][t] - Z[i][t] for t in range(3)]
        b = [Z[k][t] - Z[i][t] for t in range(3)]
        nrm = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
        if nrm == (0, 0, 0):
            continue
        off = sum(p * q for p, q in zip(nrm, Z[i]))
        g = gcd(gcd(gcd(nrm[0], nrm[1]), nrm[2]), off)
        key = tuple(v // g for v in nrm) + (off // g,)
        lead = next(v for v in key if v != 0)
        if lead < 0:
            key = tuple(-v for v in key)
        if key in seen:
            continue
        seen.add(key)
        vals = [sum(p * q for p, q in zip(nrm, z)) - off for z in Z]
        if all(v >= 0 for v in vals):
            sign = 1
        elif all(v <= 0 for v in vals):
            sign = -1
        else:
            continue
        on = frozenset(idx for idx, v in enumerate(vals) if v == 0)
        normal = tuple(Fraction(sign * v) for v in nrm)
        facets.append((normal, Fraction(sign * off, den), on))
    return facets


def _exact_hull(points):
    pts = sorted(set(points))
    n = len(pts[0])
    p0 = pts[0]
    basis, pivots = ex.rref([ex.sub(p, p0) for p in pts[1:]], n)
    d = len(pivots)
    equalities = []
    for a in ex.nullspace(basis, n):
        equalities.append((a, ex.dot(a, p0)))
    Y = [tuple(p[c] for c in pivots) for p in pts]

    def lift(c):
        a = [Fraction(0)] * n
        for j, col in enumerate(pivots):
            a[col] = c[j]
        return tuple(a)

    if d == 0:
        return pts[:1], 0, equalities, []
    if d == 1:
        lo = min(range(len(Y)), key=lambda i: Y[i])
        hi = max(range(len(Y)), key=lambda i: Y[i])
        verts = [pts[lo], pts[hi]]
        facets = [
            (lift((Fraction(1),)), Y[lo][0], frozenset([0])),
            (lift((Fraction(-1),)), -Y[hi][0], frozenset([1])),
        ]
        return verts, 1, equalities, facets
    if d == 2:
        ring = _chain_2d(Y, _cross2, lambda c: c > 0)
        verts = [pts[i] for i in ring]
        facets = []
        m = len(ring)
        for t in range(m):
            u, v = Y[ring[t]], Y[ring[(t + 1) % m]]
            c = (u[1] - v[1], v[0] - u[0])
            facets.append((lift(c), ex.dot(c, u), frozenset([t, (t + 1) % m])))
        return verts, 2, equalities, facets
    raw = _exact_facets_3d(Y)
    normals_at = [[] for _ in Y]
    for normal, _, on in raw:
        for i in on:
            normals_at[i].append(normal)
    extreme = [i for i in range(len(Y)) if ex.rank(normals_at[i], 3) == 3]
    remap = {old: new for new, old in enumerate(extreme)}
    verts = [pts[i] for i in extreme]
    facets = [(lift(c), off, frozenset(remap[i] for i in on if i in remap))
              for c, off, on in raw]
    return verts, 3, equalities, facets


# -- float hull ---------------------------------------------------------------

def _float_hull(points, tol):
    P = np.unique(np.asarray(points, dtype=float), axis=0)
    n = P.shape[1]
    ctr = P.mean(axis=0)
    X = P - ctr
    scale = max(1.0, float(np.abs(X).max()) if X.size else 1.0)
    if len(P) == 1:
        d, basis, comp = 0, np.zeros((0, n)), np.eye(n)
    else:
        _, s, vt = np.linalg.svd(X, full_matrices=True)
        d = int(np.sum(s > tol * scale))
        basis, comp = vt[:d], vt[d:]
    equalities = [(tuple(c), float(c @ ctr)) for c in comp]
    Y = X @ basis.T

    def lift(c_local, off_local):
        # c_local . y >= off_local  <=>  a . x >= b
        a = np.asarray(c_local) @ basis
        return tuple(a), float(off_local + a @ ctr)

    if d == 0:
        return [tuple(P[0])], 0, equalities, []
    if d == 1:
        lo, hi = int(np.argmin(Y[:, 0])), int(np.argmax(Y[:, 0]))
        verts = [tuple(P[lo]), tuple(P[hi])]
        f0 = lift([1.0], Y[lo, 0]) + (frozenset([0]),)
        f1 = lift([-1.0], -Y[hi, 0]) + (frozenset([1]),)
        return verts, 1, equalities, [f0, f1]
    if d == 2:
        Yl = [tuple(y) for y in Y]
        ring = _chain_2d(Yl, _cross2, lambda c: c > tol * scale * scale)
        verts = [tuple(P[i]) for i in ring]
        facets = []
        m = len(ring)
        for t in range(m):
            u, v = Y[ring[t]], Y[ring[(t + 1) % m]]
            c = np.array([u[1] - v[1], v[0] - u[0]])
            c /= np.linalg.norm(c)
            facets.append(lift(c, float(c @ u)) + (frozenset([t, (t + 1) % m]),))
        return verts, 2, equalities, facets
    hull = ConvexHull(Y)
    groups = []
    for eq in hull.equations:
        nrm, off = eq[:3], eq[3]
        if not any(np.abs(g[0] - nrm).max() < 1e-7 and abs(g[1] - off) < 1e-7 * scale
                   for g in groups):
            groups.append((nrm, off))
    cand = list(hull.vertices)
    on_sets = []
    for nrm, off in groups:
        on_sets.append({i for i in cand if abs(Y[i] @ nrm + off) <= tol * scale})
    normals_at = {i: [g[0] for g, on in zip(groups, on_sets) if i in on] for i in cand}
    extreme = sorted(i for i in cand
                     if np.linalg.matrix_rank(np.array(normals_at[i]), tol=1e-7) == 3)
    remap = {old: new for new, old in enumerate(extreme)}
    verts = [tuple(P[i]) for i in extreme]
    facets = []
    for (nrm, off), on in zip(groups, on_sets):
        facets.append(lift(-nrm, off) + (frozenset(remap[i] for i in on if i in remap),))
    return verts, 3, equalities, facets


# -- polytope -----------------------------------------------------------------

class ConvexPolytope:
    """Convex hull of finitely many points, stored by its extreme points.

    Parameters
    ----------
    vertices : iterable of coordinate sequences
        Any generating set. Exact mode is used when every coordinate is an
        int, Fraction or ``"p/q"`` string; otherwise coordinates are floats.
    tol : float
        Predicate tolerance in float mode.
    """

    def __init__(self, vertices, tol=FLOAT_TOL):
        raw = [tuple(v) for v in vertices]
        if not raw:
            raise ValidationError("a convex polytope needs at least one point")
        arity = {len(v) for v in raw}
        if len(arity) != 1:
            raise ValidationError("points of mixed arity")
        self.ambient_dim = arity.pop()
        if self.ambient_dim > 3:
            raise ValidationError("ambient dimension capped at 3")
        self.exact = all(ex.is_exact_coord(c) for v in raw for c in v)
        self.tol = tol
        if self.ambient_dim == 0:
            verts, dim, eqs, facets = [()], 0, [], []
        elif self.exact:
            verts, dim, eqs, facets = _exact_hull([ex.point(v) for v in raw])
        else:
            verts, dim, eqs, facets = _float_hull([[float(c) for c in v] for v in raw], tol)
        order = sorted(range(len(verts)), key=lambda i: verts[i])
        inv = {old: new for new, old in enumerate(order)}
        self.vertices = tuple(verts[i] for i in order)
        self.dim = dim
        self.equalities = tuple(eqs)
        self.facets = tuple((a, b, frozenset(inv[i] for i in on)) for a, b, on in facets)
        self._lattice = None

    # identity --------------------------------------------------------------
    def _key(self):
        return (self.exact, self.vertices)

    def __eq__(self, other):
        return isinstance(other, ConvexPolytope) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        def fmt(c):
            return str(c) if isinstance(c, Fraction) else f"{c:.6g}"
        vs = ", ".join("(" + ", ".join(fmt(c) for c in v) + ")" for v in self.vertices[:6])
        more = ", ..." if len(self.vertices) > 6 else ""
        return f"ConvexPolytope(dim={self.dim}, [{vs}{more}])"

    # predicates ------------------------------------------------------------
    def contains(self, x, relative_interior=False):
        if self.exact:
            x = ex.point(x)
            if any(ex.dot(a, x) != b for a, b in self.equalities):
                return False
            if relative_interior:
                return all(ex.dot(a, x) > b for a, b, _ in self.facets)
            return all(ex.dot(a, x) >= b for a, b, _ in self.facets)
        xf = np.asarray(x, dtype=float)
        t = self.tol * max(1.0, float(np.abs(xf).max()) if xf.size else 1.0)
        if any(abs(np.dot(a, xf) - b) > t for a, b in self.equalities):
            return False
        if relative_interior:
            return all(np.dot(a, xf) - b > t for a, b, _ in self.facets)
        return all(np.dot(a, xf) - b >= -t for a, b, _ in self.facets)

    def hyperplanes(self):
        """Affine functionals whose arrangement contains relint(P) as a union of faces."""
        return [(a, b) for a, b in self.equalities] + [(a, b) for a, b, _ in self.facets]

    # faces ----------------------------------------------------------------
    def face_lattice(self):
        """All nonempty faces as {frozenset(vertex indices): dim}, P included."""
        if self._lattice is None:
            full = frozenset(range(len(self.vertices)))
            found = {full}
            frontier = {f for _, _, f in self.facets if f}
            facet_sets = list(frontier)
            while frontier:
                found |= frontier
                nxt = set()
                for a in frontier:
                    for b in facet_sets:
                        c = a & b
                        if c and c not in found:
                            nxt.add(c)
                frontier = nxt
            for i in range(len(self.vertices)):
                found.add(frozenset([i]))
            self._lattice = {f: self._affine_dim(f) for f in found}
        return self._lattice

    def _affine_dim(self, idx):
        pts = [self.vertices[i] for i in sorted(idx)]
        if self.exact:
            return ex.affine_rank(pts)
        if len(pts) == 1:
            return 0
        X = np.asarray(pts, dtype=float)
        X = X - X[0]
        return int(np.linalg.matrix_rank(X, tol=self.tol * max(1.0, np.abs(X).max())))

    def faces(self, k=None):
        out = []
        for idx, d in sorted(self.face_lattice().items(), key=lambda t: (t[1], sorted(t[0]))):
            if k is None or d == k:
                out.append(ConvexPolytope([self.vertices[i] for i in sorted(idx)], tol=self.tol))
        return out

    def face_index(self, face):
        """Vertex-index set of ``face`` in this polytope, or None if not a face."""
        lookup = {v: i for i, v in enumerate(self.vertices)}
        if self.exact and face.exact:
            idx = [lookup.get(v) for v in face.vertices]
        else:
            idx = []
            for v in face.vertices:
                hit = [i for i, w in enumerate(self.vertices)
                       if np.allclose(np.asarray(v, float), np.asarray(w, float),
                                      atol=1e-9, rtol=0)]
                idx.append(hit[0] if hit else None)
        if any(i is None for i in idx):
            return None
        key = frozenset(idx)
        return key if key in self.face_lattice() else None

    def facets_containing(self, idx):
        return [(a, b) for a, b, on in self.facets if idx <= on]

    # transformations -------------------------------------------------------
    def affine_image(self, linear, translation):
        """Image under x -> L x + t (exact if both polytope and map are exact)."""
        out = []
        for v in self.vertices:
            out.append(tuple(ex.dot(row, v) + t for row, t in zip(linear, translation)))
        return ConvexPolytope(out, tol=self.tol)

    def rigid_motion(self, R, t):
        R = np.asarray(R, dtype=float)
        t = np.asarray(t, dtype=float)
        V = np.asarray(self.vertices, dtype=float) @ R.T + t
        return ConvexPolytope([tuple(map(float, v)) for v in V], tol=self.tol)

    def scaled(self, lam):
        return ConvexPolytope([tuple(lam * c for c in v) for v in self.vertices], tol=self.tol)

    def to_float(self):
        if not self.exact:
            return self
        return ConvexPolytope([tuple(float(c) for c in v) for v in self.vertices], tol=self.tol)

    def centroid(self):
        if self.exact:
            return ex.centroid(self.vertices)
        return tuple(np.mean(np.asarray(self.vertices, float), axis=0))


def minkowski_sum(P, Q):
    """Convex hull of all pairwise vertex sums."""
    if P.ambient_dim != Q.ambient_dim:
        raise ValidationError("Minkowski sum of polytopes in different dimensions")
    sums = [tuple(a + b for a, b in zip(u, v)) for u in P.vertices for v in Q.vertices]
    return ConvexPolytope(sums, tol=min(P.tol, Q.tol))


def simplex_polytope(points):
    return ConvexPolytope(points)


def vertex_enumeration(eqs, ineqs, n):
    """Vertices of {x : a.x == b for eqs, a.x >= b for ineqs} (exact, bounded).

    Returns (vertices, param) where ``param`` is the (x0, basis) of the
    equality solution set, or ([], None) when infeasible.
    """
    sol = ex.solve_affine(eqs, n)
    if sol is None:
        return [], None
    x0, basis = sol
    k = len(basis)
    # restrict inequalities to the parameter space z: x = x0 + sum z_j basis_j
    red = []
    for a, b in ineqs:
        c = tuple(ex.dot(a, v) for v in basis)
        d = b - ex.dot(a, x0)
        if all(ci == 0 for ci in c):
            if d > 0:
                return [], None
            continue
        red.append((c, d))
    if k == 0:
        return [x0], sol
    verts = set()
    for combo in combinations(red, k):
        A = [c for c, _ in combo]
        z = ex.solve_square(A, [d for _, d in combo])
        if z is None:
            continue
        if all(ex.dot(c, z) >= d for c, d in red):
            x = tuple(x0[i] + sum(z[j] * basis[j][i] for j in range(k)) for i in range(n))
            verts.add(x)
    return sorted(verts), sol
