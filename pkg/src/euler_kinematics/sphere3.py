"""Ball-generated constructible functions on the 3-sphere.

S^3 is the group of unit quaternions.  SO(4) acts by x -> e x conj(f), and
geodesic balls convolve by B(p, r) * B(q, s) = B(pq, r + s) while r + s < pi/2.

Crofton valuations

    nu_i(phi) = E_E[ chi(phi restricted to E) ],   E a random great (3-i)-sphere,

are estimated by Monte Carlo.  Since chi is additive, chi(phi|E) is the
weighted sum of chi(B_j cap E) over the balls, and each B_j cap E is empty,
a cap/arc/point, or all of E.  Great 0-spheres are taken to be single points,
which makes nu_3 the normalised volume.
"""
from dataclasses import dataclass
from itertools import product
import logging
import math

import numpy as np

from .errors import (DegenerateTangency, InvalidSampleCount, OutOfRange,
                     RadiusSumExceedsRegime, ValidationError)
from .rng import blocks, map_ordered, stream
from .valuations import solve_template

log = logging.getLogger(__name__)

HALF_PI = math.pi / 2
TANGENCY_TOL = 1e-9


# -- quaternions ------------------------------------------------------------------------

def qmul(a, b):
    """Hamilton product on arrays of shape (..., 4), components (w, x, y, z)."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=-1)


def qconj(a):
    return np.asarray(a, float) * np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class UnitQuaternion:
    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        v = np.array([self.w, self.x, self.y, self.z], dtype=float)
        n = np.linalg.norm(v)
        if not np.isfinite(n) or abs(n - 1) > 1e-6:
            raise ValidationError(f"quaternion norm {n} is not 1", self)
        v = v / n
        for name, c in zip("wxyz", v):
            object.__setattr__(self, name, float(c))

    @classmethod
    def from_array(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(*(v / np.linalg.norm(v)))

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 0.0)

    def array(self):
        return np.array([self.w, self.x, self.y, self.z])

    def __mul__(self, other):
        return UnitQuaternion.from_array(qmul(self.array(), other.array()))

    def conj(self):
        return UnitQuaternion(self.w, -self.x, -self.y, -self.z)

    def distance(self, other):
        """Geodesic distance on S^3."""
        return float(np.arccos(np.clip(self.array() @ other.array(), -1.0, 1.0)))


@dataclass(frozen=True)
class GeodesicBall:
    center: UnitQuaternion
    radius: float

    def __post_init__(self):
        if not 0 < self.radius < math.pi:
            raise ValidationError(f"radius {self.radius} outside (0, pi)", self)

    def contains(self, p):
        p = np.asarray(p.array() if isinstance(p, UnitQuaternion) else p, float)
        return np.arccos(np.clip(p @ self.center.array(), -1.0, 1.0)) <= self.radius


class BallCF:
    """Integer combination sum w_j 1_{B_j} of closed geodesic balls."""

    def __init__(self, terms=()):
        merged = {}
        for w, ball in terms:
            if int(w) != w:
                raise ValidationError("ball weights must be integers", w)
            merged[ball] = merged.get(ball, 0) + int(w)
        self.terms = tuple((w, b) for b, w in merged.items() if w)

    @classmethod
    def ball(cls, center, radius, weight=1):
        if not isinstance(center, UnitQuaternion):
            center = UnitQuaternion.from_array(center)
        return cls([(weight, GeodesicBall(center, float(radius)))])

    def __call__(self, p):
        return sum(w for w, b in self.terms if b.contains(p))

    def __add__(self, other):
        return BallCF(self.terms + other.terms)

    def __eq__(self, other):
        return isinstance(other, BallCF) and set(self.terms) == set(other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __repr__(self):
        return f"BallCF({len(self.terms)} balls)"

    def is_zero(self):
        return not self.terms

    def arrays(self):
        """(centers (m,4), radii (m,), weights (m,))."""
        if not self.terms:
            return np.zeros((0, 4)), np.zeros(0), np.zeros(0, dtype=int)
        C = np.array([b.center.array() for _, b in self.terms])
        R = np.array([b.radius for _, b in self.terms])
        W = np.array([w for w, _ in self.terms], dtype=int)
        return C, R, W


@dataclass(frozen=True)
class SO4Element:
    """x -> e x conj(f); (e, f) and (-e, -f) are identified by forcing e.w >= 0."""

    left: UnitQuaternion
    right: UnitQuaternion

    def __post_init__(self):
        e = self.left.array()
        if e[0] < 0 or (e[0] == 0 and tuple(-e) > tuple(e)):
            object.__setattr__(self, "left", UnitQuaternion.from_array(-e))
            object.__setattr__(self, "right", UnitQuaternion.from_array(-self.right.array()))

    @classmethod
    def identity(cls):
        return cls(UnitQuaternion.identity(), UnitQuaternion.identity())

    def apply(self, x):
        """Act on points given as arrays (..., 4)."""
        return qmul(qmul(self.left.array(), x), qconj(self.right.array()))

    def matrix(self):
        return np.array([self.apply(e) for e in np.eye(4)]).T


def act(g, phi):
    """g_* phi: every center c goes to e c conj(f)."""
    return BallCF([(w, GeodesicBall(UnitQuaternion.from_array(g.apply(b.center.array())),
                                    b.radius)) for w, b in phi.terms])


def convolve_balls(phi, psi):
    """Bilinear extension of 1_{B(p,r)} * 1_{B(q,s)} = 1_{B(pq, r+s)}."""
    terms = []
    for (m, a), (n, b) in product(phi.terms, psi.terms):
        s = a.radius + b.radius
        if s >= HALF_PI:
            raise RadiusSumExceedsRegime(f"radius sum {s:.6g} is not below pi/2")
        terms.append((m * n, GeodesicBall(a.center * b.center, s)))
    return BallCF(terms)


# -- closed forms ---------------------------------------------------------------------

def _f(i, r):
    c, s = np.cos(r), np.sin(r)
    if i == 0:
        return np.ones_like(r)
    if i == 1:
        return 2 * (c * s + r) / math.pi
    if i == 2:
        return s * s
    if i == 3:
        return (r - c * s) / math.pi
    raise OutOfRange(f"valuation index {i} not in 0..3")


def f_closed(i, r):
    """nu_i of a geodesic ball of radius r in [0, pi/2]."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or np.any(arr > HALF_PI):
        raise OutOfRange(f"radius outside [0, pi/2]: {r}")
    out = _f(i, arr)
    return float(out) if out.ndim == 0 else out


def ball_family():
    return [lambda r, i=i: _f(i, np.asarray(r, float)) for i in range(4)]


def nu_exact(i, phi):
    """nu_i of a ball combination by linearity over its balls."""
    return float(sum(w * f_closed(i, b.radius) for w, b in phi.terms))


# Coefficients d[i][(k, l)] of the S^3 multiplicative kinematic formula, as published.
_PI2 = math.pi ** 2
KINEMATIC_TABLE = {
    0: {(0, 0): 1.0},
    1: {(0, 1): 1.0, (1, 0): 1.0, (1, 2): -1.0, (2, 1): -1.0, (2, 3): 2.0, (3, 2): 2.0},
    2: {(0, 2): 1.0, (2, 0): 1.0, (1, 1): _PI2 / 8, (1, 3): -_PI2 / 4, (3, 1): -_PI2 / 4,
        (2, 2): -2.0, (3, 3): _PI2 / 2},
    3: {(0, 3): 1.0, (3, 0): 1.0, (1, 2): 0.5, (2, 1): 0.5, (2, 3): -1.0, (3, 2): -1.0},
}


def table_tensor():
    T = np.zeros((4, 4, 4))
    for i, row in KINEMATIC_TABLE.items():
        for (k, l), c in row.items():
            T[i, k, l] = c
    return T


def default_grid(count_r=20, count_s=20, r_max=math.pi / 4, r_min=0.01):
    rs = np.linspace(r_min, r_max, count_r)
    ss = np.linspace(r_min, r_max, count_s)
    return np.array([(r, s) for r in rs for s in ss])


def verify_m_table(grid):
    """Max over the grid of |f_i(r+s) - sum d^i_kl f_k(r) f_l(s)|, per i."""
    G = np.asarray(grid, float).reshape(-1, 2)
    r, s = G[:, 0], G[:, 1]
    if np.any(r + s > HALF_PI + 1e-12) or np.any(G <= 0):
        raise OutOfRange("grid must lie in the region r, s > 0, r + s <= pi/2")
    fr = np.array([_f(k, r) for k in range(4)])
    fs = np.array([_f(k, s) for k in range(4)])
    out = np.zeros(4)
    for i, row in KINEMATIC_TABLE.items():
        rhs = sum(c * fr[k] * fs[l] for (k, l), c in row.items())
        out[i] = np.abs(_f(i, r + s) - rhs).max()
    return out


def recover_d(grid):
    """Fit the coefficients from the ball family alone (the table is not consulted)."""
    G = np.asarray(grid, float).reshape(-1, 2)
    if np.any(G[:, 0] + G[:, 1] > HALF_PI + 1e-12):
        raise OutOfRange("template grid must satisfy r + s <= pi/2")
    return solve_template(ball_family(), G, basis=("nu0", "nu1", "nu2", "nu3"))


# -- sampling -----------------------------------------------------------------------

def _uniform_quaternions(rng, m):
    q = rng.standard_normal((m, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def sample_so4(rng):
    e, f = _uniform_quaternions(rng, 2)
    return SO4Element(UnitQuaternion.from_array(e), UnitQuaternion.from_array(f))


@dataclass(frozen=True)
class GreatSphere:
    """S^3 cap W for the span W of the orthonormal columns of ``frame`` (4 x (d+1)).

    For d = 0 the subsphere is the single point ``frame[:, 0]``.
    """

    frame: np.ndarray

    @property
    def dim(self):
        return self.frame.shape[1] - 1


def _frames(rng, d, m):
    if d == 0:
        return _uniform_quaternions(rng, m)[:, :, None]
    A = rng.standard_normal((m, 4, d + 1))
    Q, _ = np.linalg.qr(A)
    return Q


def sample_subsphere(d, rng):
    if d not in (0, 1, 2):
        raise ValidationError(f"subsphere dimension {d} not in 0..2")
    return GreatSphere(_frames(rng, d, 1)[0])


def _chi_batch(C, R, W, frames, d):
    """chi of the ball combination on each sampled subsphere; also a tangency mask."""
    cosr = np.cos(R)
    if d == 0:
        t = frames[:, :, 0] @ C.T                      # (m, balls)
        hit = t >= cosr
        bad = np.abs(t - cosr) < TANGENCY_TOL
        return (hit * W).sum(axis=1), bad.any(axis=1)
    proj = np.einsum("mkj,bk->mbj", frames, C)         # coordinates of centers in W
    rho = np.linalg.norm(proj, axis=2)
    hit = rho >= cosr
    whole = -rho >= cosr
    chi_whole = 0 if d == 1 else 2                     # circle vs 2-sphere
    chi = np.where(whole, chi_whole, hit.astype(int))
    bad = (np.abs(rho - cosr) < TANGENCY_TOL) | (np.abs(rho + cosr) < TANGENCY_TOL)
    return (chi * W).sum(axis=1), bad.any(axis=1)


def euler_integral_on_subsphere(phi, E):
    """Integer chi of phi restricted to a great d-sphere, d in 0..2."""
    d = E.dim
    if d not in (0, 1, 2):
        raise ValidationError(f"subsphere dimension {d} not in 0..2")
    C, R, W = phi.arrays()
    if not len(W):
        return 0
    frame = np.asarray(E.frame, float)
    if np.abs(frame.T @ frame - np.eye(d + 1)).max() > 1e-9:
        raise ValidationError("subsphere frame is not orthonormal", E)
    chi, bad = _chi_batch(C, R, W, frame[None], d)
    if bad[0]:
        raise DegenerateTangency("a ball boundary is tangent to the subsphere")
    return int(chi[0])


def _crofton_block(C, R, W, d, seed, tag, key, size):
    rng = stream(seed, tag, *key)
    chi, bad = _chi_batch(C, R, W, _frames(rng, d, size), d)
    attempt = 0
    while bad.any():
        attempt += 1
        idx = np.flatnonzero(bad)
        rng2 = stream(seed, tag + "/resample", *key, attempt)
        c2, b2 = _chi_batch(C, R, W, _frames(rng2, d, len(idx)), d)
        chi[idx] = c2
        bad[:] = False
        bad[idx] = b2
        log.info("resampled %d tangent subspheres", len(idx))
    return chi


def crofton_valuation(i, phi, N, seed, workers=1, tag="crofton"):
    """Monte Carlo nu_i(phi) with its standard error; nu_0 is exact."""
    if i not in (0, 1, 2, 3):
        raise OutOfRange(f"valuation index {i} not in 0..3")
    if i == 0:
        return float(sum(w for w, _ in phi.terms)), 0.0
    if N <= 0:
        raise InvalidSampleCount(f"need a positive sample count, got {N}")
    C, R, W = phi.arrays()
    if not len(W):
        return 0.0, 0.0
    d = 3 - i
    parts = map_ordered(lambda bs: _crofton_block(C, R, W, d, seed, tag, (i, bs[0]), bs[1]),
                        blocks(N), workers)
    chi = np.concatenate(parts).astype(float)
    se = float(chi.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return float(chi.mean()), se


def mc_kinematic_s3(phi1, phi2, i, N_g, N_crofton, seed, workers=1):
    """Compare the SO(4) average of nu_i(phi1 * g_* phi2) with the table bilinear form.

    Returns
    -------
    dict with ``lhs``, ``se`` (Monte Carlo), ``rhs``, ``z`` (|lhs - rhs| / se or 0).
    The right side uses nu_k of the factors evaluated ball by ball.
    """
    if N_g <= 0 or N_crofton <= 0:
        raise InvalidSampleCount("sample counts must be positive")
    for (_, a), (_, b) in product(phi1.terms, phi2.terms):
        if a.radius + b.radius >= HALF_PI:
            raise RadiusSumExceedsRegime("radius sums must stay below pi/2")

    def one(j):
        g = sample_so4(stream(seed, "s3-group", j))
        conv = convolve_balls(phi1, act(g, phi2))
        est, _ = crofton_valuation(i, conv, N_crofton, seed, tag=f"s3-kinematic/{j}")
        return est

    vals = np.array(map_ordered(one, range(N_g), workers))
    lhs = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(N_g)) if N_g > 1 else 0.0
    a = np.array([nu_exact(k, phi1) for k in range(4)])
    b = np.array([nu_exact(k, phi2) for k in range(4)])
    rhs = float(a @ table_tensor()[i] @ b)
    z = abs(lhs - rhs) / se if se > 0 else (0.0 if abs(lhs - rhs) < 1e-10 else math.inf)
    return {"lhs": lhs, "se": se, "rhs": rhs, "z": z, "values": vals}
