"""Independent reference computations used by the tests.

None of these go through the simplicial machinery they check.
"""
from fractions import Fraction
import math

import numpy as np
from scipy.spatial import ConvexHull


def pc_value(pc, x):
    """Value of sum m 1_P at x straight from the closed convex pieces."""
    return sum(m for m, P in pc.terms if P.contains(tuple(Fraction(c) for c in x)))


def pc_pushforward_value(pc, f, y):
    """(f_* sum m 1_P)(y) = sum of m over pieces whose image contains y.

    Each fibre of a closed convex piece is convex, so it has Euler
    characteristic 1 when nonempty.
    """
    from euler_kinematics import ConvexPolytope
    total = 0
    for m, P in pc.terms:
        img = ConvexPolytope([f(v) for v in P.vertices]) if f.target_dim else None
        if img is None or img.contains(tuple(y)):
            total += m
    return total


def pc_chi(pc):
    return sum(m for m, _ in pc.terms)


def external_angle_mc(V, face_vertices, n_samples, rng):
    """Monte Carlo normalised external angle of the face F of conv(V).

    A direction u is in the normal cone of F iff every vertex of F attains
    max <u, v>.  Sampling Gaussian u in the orthogonal complement of F's
    direction space gives the angle as a hit fraction, with its SE.
    """
    V = np.asarray(V, float)
    F = np.asarray(face_vertices, float)
    d = V.shape[1]
    if len(F) > 1:
        D = F[1:] - F[0]
        _, s, vt = np.linalg.svd(D)
        k = int(np.sum(s > 1e-12))
        Bperp = vt[k:]
    else:
        Bperp = np.eye(d)
    U = rng.standard_normal((n_samples, len(Bperp))) @ Bperp
    h_face = U @ F[0]
    h_all = (U @ V.T).max(axis=1)
    hits = h_face >= h_all - 1e-12
    p = hits.mean()
    return p, math.sqrt(p * (1 - p) / n_samples)


def _hull_planes(V):
    """Distinct facet planes (unit outward normal, offset) of conv(V) in R^3."""
    eq = ConvexHull(V).equations
    planes = []
    for row in eq:
        if not any(np.allclose(row, p, atol=1e-10) for p in planes):
            planes.append(row)
    return np.array(planes)


def _hull_edges(V, planes, tol=1e-9):
    on = np.abs(V @ planes[:, :3].T + planes[:, 3]) < tol      # vertex x plane
    edges = []
    for i in range(len(V)):
        for j in range(i + 1, len(V)):
            if np.count_nonzero(on[i] & on[j]) >= 2:
                edges.append((i, j))
    return edges


def _in_tube(X, V, planes, edges, eps, tol=1e-12):
    N, c = planes[:, :3], planes[:, 3]
    s = X @ N.T + c                                  # signed distances, <= 0 inside
    inside = (s <= tol).all(axis=1)
    for f in range(len(N)):
        # projection onto the facet plane lands in P, within eps of the plane
        proj = X - s[:, f:f + 1] * N[f]
        ok = (proj @ N.T + c <= 1e-9).all(axis=1) & (np.abs(s[:, f]) <= eps)
        inside |= ok
    for i, j in edges:
        a, d = V[i], V[j] - V[i]
        t = np.clip((X - a) @ d / (d @ d), 0.0, 1.0)
        dist = np.linalg.norm(X - a - t[:, None] * d, axis=1)
        inside |= dist <= eps
    return inside


def tube_volume_mc(V, eps, n_samples, rng, chunk=200_000):
    """Volume of the eps-neighbourhood of conv(V) in R^3 by box sampling.

    The neighbourhood is the union of P, the slabs over facets, and the
    capsules around edges (which contain the vertex balls), so membership
    needs no nearest-point solve.  Returns (estimate, standard error).
    """
    V = np.asarray(V, float)
    planes = _hull_planes(V)
    edges = _hull_edges(V, planes)
    lo, hi = V.min(axis=0) - eps, V.max(axis=0) + eps
    box = float(np.prod(hi - lo))
    hits = 0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        X = lo + (hi - lo) * rng.random((m, 3))
        hits += int(_in_tube(X, V, planes, edges, eps).sum())
        done += m
    p = hits / n_samples
    return box * p, box * math.sqrt(p * (1 - p) / n_samples)


def steiner_volume(v, eps):
    """vol(P + eps B) from V_0..V_3 with ball volumes kappa_j."""
    kappa = [1.0, 2.0, math.pi, 4 * math.pi / 3]
    return sum(v[3 - j] * kappa[j] * eps ** j for j in range(4))


def ball_product_excess(P, c1, r1, c2, r2, rng, n_search=200):
    """Smallest found d(x^-1 p, c2) - r2 over x in B(c1, r1), per row p of P.

    A value <= 0 certifies p in B(c1,r1) B(c2,r2) by an explicit factorisation
    p = x y.  Candidates: the point of B(c1, r1) nearest to p c2^-1 (found with
    plain spherical geometry) plus ``n_search`` random points of B(c1, r1).
    """
    from euler_kinematics.sphere3 import qconj, qmul

    def dist(a, b):
        return np.arccos(np.clip(np.sum(a * b, axis=-1), -1.0, 1.0))

    P = np.atleast_2d(np.asarray(P, float))
    target = qmul(P, qconj(c2))
    d = dist(c1, target)
    t = np.minimum(1.0, r1 / np.maximum(d, 1e-300))[:, None]
    sd = np.sin(d)[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        X = (np.sin((1 - t) * d[:, None]) * c1 + np.sin(t * d[:, None]) * target) / sd
    X = np.where(sd > 1e-12, X, target)
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    best = dist(qmul(qconj(X), P), c2) - r2
    Z = rng.standard_normal((n_search, 4))
    Z -= np.outer(Z @ c1, c1)
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    ang = r1 * rng.random(n_search) ** (1 / 3)
    cands = np.cos(ang)[:, None] * c1 + np.sin(ang)[:, None] * Z
    for x in cands:
        best = np.minimum(best, dist(qmul(qconj(x), P), c2) - r2)
    return best
