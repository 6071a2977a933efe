"""Intrinsic volumes and the flat additive kinematic harness.

Normalisation is the classical one: V_0 = Euler characteristic, V_1 of a
segment is its length, V_n is Lebesgue volume.  On polytopes

    V_k(P) = sum over k-faces F of vol_k(F) * gamma(F, P)

with gamma the normalised external angle.
"""
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
import logging
import math

import numpy as np
from scipy.spatial import ConvexHull
from scipy.special import gamma as gamma_fn

from .cf import PolytopeCombination, StratifiedCF
from .core import to_polytope_combination
from .errors import InvalidSampleCount, NotAFace, RankDeficientSystem, ValidationError
from .ops import check_orthogonal
from .polytope import ConvexPolytope, minkowski_sum
from .rng import map_ordered, stream

log = logging.getLogger(__name__)


# -- geometry helpers -----------------------------------------------------------------

def _frame(X, tol=1e-9):
    """Orthonormal rows spanning the affine hull of the rows of X."""
    X = np.asarray(X, dtype=float)
    if len(X) == 1:
        return np.zeros((0, X.shape[1]))
    D = X[1:] - X[0]
    _, s, vt = np.linalg.svd(D)
    k = int(np.sum(s > tol * max(1.0, np.abs(D).max())))
    return vt[:k]


def _kvolume(X):
    """k-dimensional volume of the convex hull of the rows of X (k = affine dim)."""
    X = np.asarray(X, dtype=float)
    B = _frame(X)
    k = len(B)
    if k == 0:
        return 1.0
    Y = (X - X.mean(axis=0)) @ B.T
    if k == 1:
        return float(Y.max() - Y.min())
    if k == 2:
        ang = np.arctan2(Y[:, 1], Y[:, 0])
        Y = Y[np.argsort(ang)]
        x, y = Y[:, 0], Y[:, 1]
        return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2)
    return float(ConvexHull(Y).volume)


def _solid_angle(normals):
    """Solid angle of the convex cone spanned by unit vectors in R^3."""
    N = np.asarray(normals, dtype=float)
    axis = N.sum(axis=0)
    axis /= np.linalg.norm(axis)
    e1 = np.cross(axis, [1.0, 0, 0])
    if np.linalg.norm(e1) < 0.5:
        e1 = np.cross(axis, [0, 1.0, 0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    N = N[np.argsort(np.arctan2(N @ e2, N @ e1))]
    total = 0.0
    a = N[0]
    for b, c in zip(N[1:-1], N[2:]):
        num = abs(np.dot(a, np.cross(b, c)))
        den = 1 + a @ b + b @ c + c @ a
        total += 2 * math.atan2(num, den)
    return total


class _Metric:
    """Float metric data of a polytope: vertices, aff frame, outward facet normals."""

    def __init__(self, P):
        self.P = P
        self.V = np.asarray(P.vertices, dtype=float).reshape(len(P.vertices), P.ambient_dim)
        self.B = _frame(self.V)
        normals = []
        for a, _, on in P.facets:
            a = np.asarray([float(c) for c in a])
            if len(self.B):
                a = self.B.T @ (self.B @ a)
            normals.append((on, -a / np.linalg.norm(a)))
        self.normals = normals

    def gamma(self, idx, dim_face):
        codim = self.P.dim - dim_face
        if codim == 0:
            return 1.0
        if codim == 1:
            return 0.5
        ns = [n for on, n in self.normals if idx <= on]
        if codim == 2:
            if len(ns) != 2:
                raise ValidationError(f"ridge lies on {len(ns)} facets")
            c = float(np.clip(ns[0] @ ns[1], -1.0, 1.0))
            return math.acos(c) / (2 * math.pi)
        # vertex of a 3-polytope: work in the 3-frame of aff P
        local = [self.B @ n for n in ns]
        return _solid_angle(local) / (4 * math.pi)


def external_angle(P, F):
    """Normalised external angle gamma(F, P) in [0, 1]."""
    idx = P.face_index(F)
    if idx is None:
        raise NotAFace(f"{F!r} is not a face of {P!r}")
    return _Metric(P).gamma(idx, P.face_lattice()[idx])


def intrinsic_volume(P, k, _metric=None):
    if k > P.dim:
        return 0.0
    if k == 0:
        return 1.0
    m = _metric or _Metric(P)
    if k == P.dim:
        return _kvolume(m.V)
    total = 0.0
    for idx, d in P.face_lattice().items():
        if d == k:
            total += _kvolume(m.V[sorted(idx)]) * m.gamma(idx, d)
    return total


def intrinsic_volumes(P):
    """Vector (V_0, ..., V_n) of a polytope in R^n."""
    m = _Metric(P)
    return np.array([intrinsic_volume(P, k, m) for k in range(P.ambient_dim + 1)])


def evaluate_valuation(k, phi, _cache=None):
    """V_k extended additively: sum m_i V_k(P_i) over the convex expansion of phi."""
    pc = phi if isinstance(phi, PolytopeCombination) else to_polytope_combination(phi)
    cache = {} if _cache is None else _cache
    total = 0.0
    for m, P in pc.terms:
        v = cache.get((P, k))
        if v is None:
            v = cache[P, k] = intrinsic_volume(P, k)
        total += m * v
    return total


def ball_intrinsic_volumes(n, r):
    """V_k of the Euclidean n-ball of radius r: binom(n,k) w_n / w_(n-k) r^k."""
    def w(j):
        return math.pi ** (j / 2) / gamma_fn(j / 2 + 1)
    return [math.comb(n, k) * w(n) / w(n - k) * np.asarray(r, dtype=float) ** k
            for k in range(n + 1)]


# -- rotations ------------------------------------------------------------------------

def quaternion_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def haar_rotation(n, rng):
    """Haar-uniform element of SO(n), n in {2, 3}."""
    if n == 2:
        t = rng.uniform(0.0, 2 * math.pi)
        c, s = math.cos(t), math.sin(t)
        return np.array([[c, -s], [s, c]])
    if n == 3:
        q = rng.standard_normal(4)
        return quaternion_matrix(q / np.linalg.norm(q))
    raise ValidationError("haar_rotation supports n = 2, 3")


# -- kinematic harness ----------------------------------------------------------------

def _edge_directions(P):
    V = np.asarray(P.vertices, dtype=float)
    out = []
    for _, _, on in P.facets:
        if len(on) == 2:
            i, j = sorted(on)
            out.append(V[j] - V[i])
    return out


def _degenerate_pair(P, Q, tol=1e-9):
    """Parallel edges in a planar Minkowski sum (a measure-zero event)."""
    if P.ambient_dim != 2 or P.dim < 2 or Q.dim < 2:
        return False
    for u in _edge_directions(P):
        for v in _edge_directions(Q):
            c = abs(u[0] * v[1] - u[1] * v[0])
            if c < tol * np.linalg.norm(u) * np.linalg.norm(v):
                return True
    return False


def _as_float_combination(phi):
    pc = phi if isinstance(phi, PolytopeCombination) else to_polytope_combination(phi)
    return [(m, P.to_float()) for m, P in pc.terms]


def rotation_average_convolution(phi1, phi2, i, N, seed, workers=1, max_resample=100):
    """Monte Carlo estimate of the Haar average of V_i(phi1 * g_* phi2) over SO(n).

    Translations integrate out since V_i is translation invariant.

    Returns
    -------
    estimate, std_error, info
        ``info`` holds the per-sample values and the resample count.
    """
    if N <= 0:
        raise InvalidSampleCount(f"need a positive sample count, got {N}")
    t1, t2 = _as_float_combination(phi1), _as_float_combination(phi2)
    n = t1[0][1].ambient_dim if t1 else t2[0][1].ambient_dim
    if n not in (2, 3):
        raise ValidationError("kinematic harness runs in R^2 or R^3")

    def one(j):
        resampled = 0
        for attempt in range(max_resample):
            R = haar_rotation(n, stream(seed, "flat-kinematic", j, attempt))
            moved = [(k, Q.rigid_motion(R, np.zeros(n))) for k, Q in t2]
            if any(_degenerate_pair(P, Q) for _, P in t1 for _, Q in moved):
                resampled += 1
                continue
            val = 0.0
            for m, P in t1:
                for k, Q in moved:
                    val += m * k * intrinsic_volume(minkowski_sum(P, Q), i)
            return val, resampled
        raise ValidationError("rotation resampling did not escape degeneracy")

    results = map_ordered(one, range(N), workers)
    vals = np.array([v for v, _ in results])
    resampled = sum(r for _, r in results)
    if resampled:
        log.info("resampled %d degenerate rotations out of %d", resampled, N)
    se = float(vals.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return float(vals.mean()), se, {"values": vals, "resampled": resampled}


@dataclass
class KinematicTensor:
    """Coefficients c[i][k][l] of V_i(K + gL) averaged = sum c[i][k][l] V_k(K) V_l(L)."""

    entries: np.ndarray
    residual: float = 0.0
    basis: tuple = field(default=())

    @property
    def order(self):
        return self.entries.shape[0]

    def __getitem__(self, ikl):
        return self.entries[ikl]

    def apply(self, i, a, b):
        return float(np.asarray(a) @ self.entries[i] @ np.asarray(b))

    def rows(self):
        N = self.order
        for i in range(N):
            for k in range(N):
                for l in range(N):
                    yield i, k, l, float(self.entries[i, k, l])


def solve_template(family, grid, basis=None):
    """Least-squares solve f_i(r+s) = sum_{k,l} d_kl^i f_k(r) f_l(s), d symmetric.

    Parameters
    ----------
    family : sequence of callables
        ``family[i](r)`` accepts numpy arrays.
    grid : array-like of (r, s) pairs

    Returns
    -------
    KinematicTensor
        With ``residual`` the max absolute equation residual over the grid.
    """
    G = np.asarray(grid, dtype=float).reshape(-1, 2)
    r, s = G[:, 0], G[:, 1]
    N = len(family)
    pairs = list(combinations_with_replacement(range(N), 2))
    if len(G) < len(pairs):
        raise RankDeficientSystem(f"{len(G)} grid points for {len(pairs)} unknowns")
    fr = [np.broadcast_to(np.asarray(f(r), float), r.shape) for f in family]
    fs = [np.broadcast_to(np.asarray(f(s), float), s.shape) for f in family]
    A = np.column_stack([fr[k] * fs[l] + (fr[l] * fs[k] if k != l else 0) for k, l in pairs])
    scale = np.abs(A).max(axis=0)
    scale[scale == 0] = 1.0
    As = A / scale
    rank = np.linalg.matrix_rank(As)
    T = np.zeros((N, N, N))
    worst = 0.0
    for i in range(N):
        b = np.asarray(family[i](r + s), float) * np.ones_like(r)
        x, *_ = np.linalg.lstsq(As, b, rcond=None)
        x = x / scale
        worst = max(worst, float(np.abs(A @ x - b).max()))
        for (k, l), c in zip(pairs, x):
            T[i, k, l] = T[i, l, k] = c
    if rank < len(pairs):
        raise RankDeficientSystem(f"template system has rank {rank} < {len(pairs)}",
                                  residual=worst, rank=rank)
    return KinematicTensor(T, worst, tuple(basis) if basis else tuple(f"f{i}" for i in range(N)))


def flat_template_family(n):
    return [lambda r, k=k: ball_intrinsic_volumes(n, r)[k] for k in range(n + 1)]


def flat_kinematic_tensor(n, count=12, r_max=2.0):
    """Additive kinematic constants for SO(n) via Euclidean ball templates."""
    g = np.linspace(r_max / count, r_max, count)
    grid = [(a, b) for a in g for b in g]
    return solve_template(flat_template_family(n), grid,
                          basis=tuple(f"V{k}" for k in range(n + 1)))


def rigid_invariance_gap(k, phi, R, t):
    """|V_k(g_* phi) - V_k(phi)| for one rigid motion."""
    check_orthogonal(R)
    pc = phi if isinstance(phi, PolytopeCombination) else to_polytope_combination(phi)
    moved = pc.rigid_motion(R, t)
    return abs(evaluate_valuation(k, moved) - evaluate_valuation(k, pc))
