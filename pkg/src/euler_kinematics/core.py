"""Ring operations on constructible functions and representation changes."""
from itertools import combinations

from .cf import PolytopeCombination, StratifiedCF, canonicalize, zero_cf
from .errors import ValidationError
from .polytope import ConvexPolytope
from .refine import _assemble, cells_to_cf, face_values, refine_cells


def _open_cells(cf, coef=1):
    """Weighted open cells of ``cf``; faces of other weighted simplices add no cuts."""
    cx = cf.complex
    weighted = [s for s, m in cf.weights.items() if m]
    covered = set()
    for s in weighted:
        for k in range(1, len(s)):
            covered.update(combinations(s, k))
    return [(coef * cf.weights[s], cx.polytope(s), False, s not in covered) for s in weighted]


def _check_same_dim(cfs):
    dims = {cf.ambient_dim for cf in cfs}
    if len(dims) > 1:
        raise ValidationError(f"mixed ambient dimensions {sorted(dims)}")
    return dims.pop()


def combine(terms):
    """Pointwise integer combination sum a_i * phi_i, canonical output."""
    terms = list(terms)
    if not terms:
        raise ValidationError("combine() needs at least one term")
    n = _check_same_dim([cf for _, cf in terms])
    cells = []
    for a, cf in terms:
        if a:
            cells += _open_cells(cf, a)
    if not cells:
        return zero_cf(n)
    _, (out,) = cells_to_cf(n, [cells])
    return canonicalize(out)


def pointwise_product(phi, psi):
    n = _check_same_dim([phi, psi])
    a, b = _open_cells(phi), _open_cells(psi)
    if not a or not b:
        return zero_cf(n)
    _, (out,) = cells_to_cf(n, [a, b], combine=lambda v: v[0] * v[1])
    return canonicalize(out)


def common_refinement(phi, psi):
    """One complex carrying both functions, values unchanged pointwise."""
    n = _check_same_dim([phi, psi])
    if phi.complex == psi.complex:
        return phi.complex, phi, psi
    cells = []
    for cf in (phi, psi):
        cx = cf.complex
        for s in cx.maximal_simplices():
            cells.append((0, cx.polytope(s), False, True))
    tris, _ = refine_cells(n, [cells])
    # values are assigned per function, on the shared face set
    vals = [face_values(tris, _open_cells(cf)) for cf in (phi, psi)]
    cx, (a, b) = _assemble(n, tris, vals)
    return cx, a, b


def cf_equal(phi, psi):
    """Pointwise equality, decided on a common refinement."""
    return combine([(1, phi), (-1, psi)]).is_zero()


def from_polytopes(pc):
    """StratifiedCF equal to sum m_i 1_{P_i} (closed, exact polytopes)."""
    pc = pc.simplified()
    if not pc.terms:
        return zero_cf(pc.ambient_dim or 0)
    if not pc.exact:
        raise ValidationError("from_polytopes needs exact polytopes")
    cells = [(m, P, True, True) for m, P in pc.terms]
    _, (out,) = cells_to_cf(pc.ambient_dim, [cells])
    return canonicalize(out)


def to_polytope_combination(cf):
    """Closed-face expansion 1_{relint s} = sum_{t <= s} (-1)^{dim s - dim t} 1_{closure t}."""
    cx = cf.complex
    acc = {}
    order = []
    for s, m in cf.weighted_items():
        d = len(s) - 1
        for k in range(len(s), 0, -1):
            for t in combinations(s, k):
                if t not in acc:
                    acc[t] = 0
                    order.append(t)
                acc[t] += m * (-1) ** (d - (k - 1))
    terms = [(acc[t], ConvexPolytope(cx.points(t))) for t in order if acc[t]]
    return PolytopeCombination(terms, cf.ambient_dim)


def polytope_indicator(P):
    """StratifiedCF of the closed indicator of an exact polytope."""
    return from_polytopes(PolytopeCombination([(1, P)]))
