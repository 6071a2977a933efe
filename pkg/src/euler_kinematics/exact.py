"""Exact rational linear algebra on small dense systems.

Points and vectors are plain tuples of :class:`fractions.Fraction`.
Nothing here is clever; dimensions never exceed 4.
"""
from fractions import Fraction
from math import gcd, lcm
import numbers


def frac(x):
    """Coerce ``x`` to a Fraction. Strings may be ``"p/q"`` or decimals."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, numbers.Real):
        return Fraction(float(x))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def point(coords):
    return tuple(frac(c) for c in coords)


def is_exact_coord(x):
    return isinstance(x, (Fraction, str)) or (
        isinstance(x, numbers.Integral) and not isinstance(x, bool))


def dot(a, b):
    s = 0
    for x, y in zip(a, b):
        s += x * y
    return s


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def scale(c, a):
    return tuple(c * x for x in a)


def centroid(points):
    pts = list(points)
    n = len(pts)
    return tuple(sum(c) / n for c in zip(*pts)) if n else ()


def rref(rows, ncols):
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows, ncols):
    return len(rref(rows, ncols)[1]) if rows else 0


def nullspace(rows, ncols):
    """Basis of {x : r.x = 0 for every row r}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def solve_affine(eqs, n):
    """Solve a.x = b for all (a, b) in ``eqs``.

    Returns ``(x0, basis)`` parametrising the solution set as x0 + span(basis),
    or None when inconsistent.
    """
    if not eqs:
        return tuple(Fraction(0) for _ in range(n)), nullspace([], n)
    aug = [list(a) + [b] for a, b in eqs]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x0 = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x0[p] = row[n]
    basis = nullspace([row[:n] for row in red], n)
    return tuple(x0), basis


def solve_square(A, b):
    """Unique solution of A x = b, or None if A is singular."""
    n = len(A)
    sol = solve_affine(list(zip(A, b)), n)
    if sol is None or sol[1]:
        return None
    return sol[0]


def affine_rank(points):
    pts = list(points)
    if not pts:
        return -1
    p0 = pts[0]
    return rank([sub(p, p0) for p in pts[1:]], len(p0))


def normalize_hyperplane(a, b):
    """Scale (a, b) to a canonical integer form with positive leading entry.

    Returns ``(key, sign)`` where ``key = (a', b')`` and ``a = sign*t*a'``
    for some t > 0.
    """
    den = 1
    for x in list(a) + [b]:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in list(a) + [b]]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    lead = next(v for v in ints[:-1] if v != 0)
    sign = 1 if lead > 0 else -1
    ints = [sign * v for v in ints]
    return (tuple(ints[:-1]), ints[-1]), sign
