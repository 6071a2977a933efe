"""Common refinement engine.

Turns weighted relatively-open convex cells into a simplicial complex.

Two entry modes:

* arrangement mode -- cells may overlap arbitrarily.  The closures are cut
  by the arrangement of every cell's defining hyperplanes; all arrangement
  faces inside the union of closures are collected.  Each face is a
  relatively open convex polytope lying entirely inside or outside every
  input cell, so one exact sample (the vertex centroid) decides its value.
* complex mode -- cells already form a polyhedral complex (disjoint,
  closed under faces), e.g. products of simplices or preimages of a
  complex.  No cutting is needed.

Either way faces are triangulated by pulling from the lexicographically
smallest vertex, which gives a consistent triangulation of shared faces.
Faces are identified by their vertex sets.
"""
from fractions import Fraction
from itertools import combinations

from . import exact as ex
from .cf import SimplicialComplex, StratifiedCF


class _Arrangement:
    def __init__(self, n):
        self.n = n
        self.index = {}
        self.planes = []
        self._rank = {}

    def register(self, a, b):
        """Register a.x = b; returns (id, sign) with a.x - b = sign*t*(canonical)."""
        key, sign = ex.normalize_hyperplane(a, b)
        hid = self.index.get(key)
        if hid is None:
            hid = len(self.planes)
            self.index[key] = hid
            self.planes.append((tuple(Fraction(c) for c in key[0]), Fraction(key[1])))
        return hid, sign

    def value(self, hid, x):
        a, b = self.planes[hid]
        return ex.dot(a, x) - b

    def rank(self, ids):
        r = self._rank.get(ids)
        if r is None:
            r = ex.rank([self.planes[i][0] for i in ids], self.n)
            self._rank[ids] = r
        return r


def _tight(arr, verts, cons):
    out = []
    for v in verts:
        out.append(frozenset(h for h, s in cons.items() if s == 0 or arr.value(h, v) == 0))
    return out


def _split_all(arr, verts, cons):
    """Cut the closed polytope (verts, cons) by every registered hyperplane."""
    done = []
    stack = [(list(verts), dict(cons))]
    n_planes = len(arr.planes)
    while stack:
        verts, cons = stack.pop()
        split = False
        for h in range(n_planes):
            if h in cons:
                continue
            vals = [arr.value(h, v) for v in verts]
            if all(v >= 0 for v in vals):
                cons[h] = 0 if all(v == 0 for v in vals) else 1
                continue
            if all(v <= 0 for v in vals):
                cons[h] = -1
                continue
            tight = _tight(arr, verts, cons)
            cross = set()
            for i, vi in enumerate(vals):
                if vi >= 0:
                    continue
                for j, vj in enumerate(vals):
                    if vj <= 0:
                        continue
                    if arr.rank(tight[i] & tight[j]) != arr.n - 1:
                        continue
                    t = vi / (vi - vj)
                    u, w = verts[i], verts[j]
                    cross.add(tuple(p + t * (q - p) for p, q in zip(u, w)))
            pos = [v for v, x in zip(verts, vals) if x > 0] + sorted(cross)
            neg = [v for v, x in zip(verts, vals) if x < 0] + sorted(cross)
            pos += [v for v, x in zip(verts, vals) if x == 0]
            neg += [v for v, x in zip(verts, vals) if x == 0]
            cp = dict(cons)
            cp[h] = 1
            cn = dict(cons)
            cn[h] = -1
            stack.append((sorted(set(pos)), cp))
            stack.append((sorted(set(neg)), cn))
            split = True
            break
        if not split:
            done.append((verts, cons))
    return done


class _FaceTable:
    def __init__(self, arr):
        self.arr = arr
        self.facets = {}
        self.dim = {}

    def enumerate(self, verts, cons):
        key = frozenset(verts)
        if key in self.facets:
            return key
        d = ex.affine_rank(verts)
        self.dim[key] = d
        fac = set()
        self.facets[key] = fac
        if d == 0:
            return key
        tried = set()
        for h, s in cons.items():
            if s == 0:
                continue
            sub = [v for v in verts if self.arr.value(h, v) == 0]
            sk = frozenset(sub)
            if not sub or sk in tried:
                continue
            tried.add(sk)
            if ex.affine_rank(sub) != d - 1:
                continue
            c2 = dict(cons)
            c2[h] = 0
            fac.add(self.enumerate(sub, c2))
        return key


def _pulling_triangulation(facets, dims):
    """Top simplices of the pulling triangulation of every face."""
    memo = {}

    def tri(key):
        if key in memo:
            return memo[key]
        if dims[key] == 0:
            out = [tuple(key)]
        else:
            v0 = min(key)
            out = []
            for g in facets[key]:
                if v0 in g:
                    continue
                for simp in tri(g):
                    out.append((v0,) + simp)
        memo[key] = out
        return out

    return {key: (dims[key], tri(key)) for key in facets}


def _carriers(tris):
    """Map every simplex of the triangulation to the face whose relint contains it.

    Faces are visited by increasing dimension; a sub-simplex lying in a
    proper face was already claimed by that face.
    """
    owner = {}
    for key, (_, tops) in sorted(tris.items(), key=lambda t: t[1][0]):
        for top in tops:
            for k in range(1, len(top) + 1):
                for s in combinations(top, k):
                    if s not in owner:
                        owner[s] = key
    return owner


def _assemble(n, tris, face_values):
    """Build the complex; ``face_values`` is a list (one per output) of {face: weight}."""
    owner = _carriers(tris)
    pts = sorted({p for s in owner for p in s})
    index = {p: i for i, p in enumerate(pts)}
    simplices = {tuple(index[p] for p in s): key for s, key in owner.items()}
    cx = SimplicialComplex(n, pts, simplices.keys())
    outs = []
    for fv in face_values:
        outs.append(StratifiedCF(cx, {s: fv[key] for s, key in simplices.items()
                                      if fv.get(key, 0)}))
    return cx, outs


def refine_cells(n, groups):
    """Arrangement mode.

    Parameters
    ----------
    n : int
        Ambient dimension.
    groups : list of list of (weight, ConvexPolytope, closed[, cut])
        Each group describes one function sum w * 1_cell where the cell is
        relint(P) if not ``closed`` else P itself.  All polytopes are exact.
        ``cut=False`` marks a cell known to be a face of another cut cell;
        it then contributes neither hyperplanes nor a root.

    Returns
    -------
    tris : {face_key: (dim, top simplices)}
        Pulling triangulation of every face of the common subdivision.
    values : list of {face_key: value}
        Values per group.
    """
    arr = _Arrangement(n)
    roots = {}
    for group in groups:
        for _, P, _, *rest in group:
            if rest and not rest[0]:
                continue
            if P.vertices in roots:
                continue
            cons = {}
            for a, b in P.equalities:
                h, _ = arr.register(a, b)
                cons[h] = 0
            for a, b, _ in P.facets:
                h, s = arr.register(a, b)
                cons[h] = s
            roots[P.vertices] = cons
    table = _FaceTable(arr)
    for verts, cons in roots.items():
        if n == 0:
            table.enumerate(list(verts), {})
            continue
        for pv, pc in _split_all(arr, verts, cons):
            table.enumerate(pv, pc)
    tris = _pulling_triangulation(table.facets, table.dim)
    return tris, [face_values(tris, group) for group in groups]


def face_values(faces, cells):
    """{face: sum of weights of cells containing the face's centroid}."""
    fv = {}
    for key in faces:
        c = ex.centroid(key)
        total = 0
        for w, P, closed, *_ in cells:
            if w and P.contains(c, relative_interior=not closed):
                total += w
        if total:
            fv[key] = total
    return fv


def cells_to_cf(n, groups, combine=None):
    """Refine and return StratifiedCFs (one per group, or one combined).

    ``combine`` maps the tuple of per-group face values to a single value.
    """
    tris, values = refine_cells(n, groups)
    if combine is not None:
        merged = {}
        for key in tris:
            v = combine(tuple(fv.get(key, 0) for fv in values))
            if v:
                merged[key] = v
        values = [merged]
    return _assemble(n, tris, values)


def complex_to_cf(n, cells):
    """Complex mode: ``cells`` is a list of (weight, vertex list) forming a polyhedral complex."""
    keys = {}
    for w, verts in cells:
        key = frozenset(verts)
        keys[key] = keys.get(key, 0) + w
    dims = {k: ex.affine_rank(list(k)) for k in keys}
    by_dim = {}
    for k, d in dims.items():
        by_dim.setdefault(d, []).append(k)
    facets = {}
    for k, d in dims.items():
        facets[k] = [g for g in by_dim.get(d - 1, []) if g <= k] if d > 0 else []
    tris = _pulling_triangulation(facets, dims)
    cx, outs = _assemble(n, tris, [{k: w for k, w in keys.items() if w}])
    return outs[0]
