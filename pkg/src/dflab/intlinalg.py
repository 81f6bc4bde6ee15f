"""Small exact linear-algebra kit over integers and rationals.

Everything works on plain ints and fractions.Fraction; no floats enter or
leave.  Sizes are tiny (ambient dimension at most a handful), so clarity
wins over asymptotics throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def vector_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    return g


def primitive(v):
    """Divide an integer vector by the gcd of its entries."""
    g = vector_gcd(v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(int(x) // g for x in v)


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def rref(rows, width=None):
    """Reduced row echelon form over Fraction: returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    cols = width if width is not None else (len(m[0]) if m else 0)
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows):
    rows = [row for row in rows if any(x != 0 for x in row)]
    if not rows:
        return 0
    return len(rref(rows)[1])


def det(rows):
    """Exact determinant by fraction Gaussian elimination."""
    n = len(rows)
    m = [[Fraction(x) for x in row] for row in rows]
    out = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            out = -out
        out *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return out


def solve_unique(columns, b):
    """Solve A x = b where A is given by its columns.

    Returns a tuple of Fractions when the system is consistent, None when
    inconsistent.  Raises ValueError when the columns are linearly
    dependent (so a consistent system would not pin x down).
    """
    ncols = len(columns)
    nrows = len(b)
    aug = [[Fraction(columns[j][i]) for j in range(ncols)] + [Fraction(b[i])]
           for i in range(nrows)]
    red, pivots = rref(aug, width=ncols + 1)
    if ncols in pivots:
        return None
    if len(pivots) != ncols:
        raise ValueError("columns are linearly dependent")
    sol = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        sol[c] = red[r][-1]
    return tuple(sol)


def _egcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def kernel_basis(w):
    """Integer basis of the lattice {v : <v, w> = 0} for primitive w.

    Built from unimodular row operations on the identity, so the returned
    vectors really generate the full kernel lattice, not a finite-index
    sublattice.
    """
    d = len(w)
    rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    c = [int(x) for x in w]
    while True:
        nz = [i for i in range(d) if c[i] != 0]
        if len(nz) <= 1:
            break
        i, j = nz[0], nz[1]
        g, x, y = _egcd(c[i], c[j])
        ri = [x * a + y * b for a, b in zip(rows[i], rows[j])]
        rj = [-(c[j] // g) * a + (c[i] // g) * b for a, b in zip(rows[i], rows[j])]
        rows[i], rows[j] = ri, rj
        c[i], c[j] = g, 0
    nz = [i for i in range(d) if c[i] != 0]
    if not nz:
        raise ValueError("zero vector")
    k = nz[0]
    if abs(c[k]) != 1:
        raise ValueError("vector must be primitive")
    return [tuple(rows[i]) for i in range(d) if i != k]


def nullspace_primitive(rows, dim):
    """Primitive integer generator of a one-dimensional rational nullspace.

    ``rows`` is a matrix with ``dim`` columns; returns None unless its rank
    is exactly dim - 1.
    """
    rows = [row for row in rows if any(x != 0 for x in row)]
    if not rows:
        if dim != 1:
            return None
        return (1,)
    red, pivots = rref(rows)
    if len(pivots) != dim - 1:
        return None
    free = next(c for c in range(dim) if c not in pivots)
    v = [Fraction(0)] * dim
    v[free] = Fraction(1)
    for r, c in enumerate(pivots):
        v[c] = -red[r][free]
    lcm = 1
    for x in v:
        lcm = lcm * x.denominator // gcd(lcm, x.denominator)
    return primitive([int(x * lcm) for x in v])


def hyperplane_normal(points):
    """Primitive normal of the affine hyperplane through points, or None."""
    p0 = points[0]
    diffs = [[x - y for x, y in zip(p, p0)] for p in points[1:]]
    return nullspace_primitive(diffs, len(p0))


def integer_inverse(rows):
    """Inverse of an integer matrix with determinant +-1, as integer rows."""
    n = len(rows)
    cols = [[rows[i][j] for i in range(n)] for j in range(n)]
    out = []
    for i in range(n):
        e = [1 if k == i else 0 for k in range(n)]
        sol = solve_unique(cols, e)
        if sol is None:
            raise ValueError("matrix is singular")
        if any(x.denominator != 1 for x in sol):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in sol])
    # solving A x = e_i yields column i of the inverse
    return tuple(tuple(out[j][i] for j in range(n)) for i in range(n))
