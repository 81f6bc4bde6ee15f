"""Lattice polytopes and the polarized toric varieties they encode.

A full-dimensional lattice polytope P in Z^n stands for a projective toric
variety together with an ample line bundle; lattice points of kP enumerate
sections of the k-th power.  This module validates the input polytope,
fixes an affine chart at a smooth vertex, counts lattice points exactly,
and computes the two intersection numbers (L^n and L^(n-1).K) every later
computation is normalized against.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import (
    InconsistentVertices,
    InvalidInput,
    NonLatticeVertex,
    NonUnimodularChartVertex,
    NotFullDimensional,
    PointOutsidePolytope,
)
from .hull import extreme_points, facets_of_points, volume_of_points
from .intlinalg import (
    det,
    dot,
    integer_inverse,
    kernel_basis,
    nullspace_primitive,
    rank,
    solve_unique,
)


@dataclass(frozen=True)
class LatticePolytope:
    dim: int
    vertices: tuple   # sorted tuples of ints
    facets: tuple     # (primitive inner normal a, offset c) with <a,x> >= c


@dataclass(frozen=True)
class PolarizedToricVariety:
    polytope: LatticePolytope
    chart_vertex: tuple
    edge_directions: tuple   # primitive generators of the cone at chart_vertex
    chart_matrix: tuple      # rows of the inverse of the edge matrix
    smooth: bool             # every vertex cone unimodular

    @property
    def dim(self):
        return self.polytope.dim

    def lattice_points(self, k):
        """All lattice points of the dilate kP, in sorted order."""
        return _lattice_points(self.polytope, k)

    def ehrhart_count(self, k):
        return len(self.lattice_points(k))

    def intersection_numbers(self):
        """(L^n, L^(n-1).K) for the polarization L and canonical divisor K."""
        return _intersection_numbers(self.polytope)

    def chart_coords(self, u, scale):
        """Coordinates of a lattice point of scale*P in the fixed chart.

        The chart identifies the cone at chart_vertex with the standard
        orthant; a point u of scale*P maps to U (u - scale * v0) >= 0.
        """
        v0 = self.chart_vertex
        shifted = [x - scale * y for x, y in zip(u, v0)]
        y = tuple(dot(row, shifted) for row in self.chart_matrix)
        if any(t < 0 for t in y):
            raise PointOutsidePolytope(
                "point %r is outside the chart cone of %r at scale %d"
                % (tuple(u), v0, scale))
        return y

    def point_from_chart(self, y, scale):
        """Inverse of chart_coords; accepts rational chart coordinates."""
        v0 = self.chart_vertex
        n = self.dim
        return tuple(
            scale * v0[i] + sum(self.edge_directions[j][i] * y[j] for j in range(n))
            for i in range(n))

    def cox_exponents(self, u, scale):
        """Per-facet exponents of the degree-scale monomial at lattice point u."""
        return tuple(dot(a, u) - scale * c for a, c in self.polytope.facets)

    def maximal_charts(self):
        """For each vertex, the indices of facets through it (its chart)."""
        out = []
        for v in self.polytope.vertices:
            idx = tuple(i for i, (a, c) in enumerate(self.polytope.facets)
                        if dot(a, v) == c)
            out.append(idx)
        return tuple(out)

    def chart_facet_indices(self):
        """Facet index tight at chart_vertex and dual to each edge direction."""
        tight = [i for i, (a, c) in enumerate(self.polytope.facets)
                 if dot(a, self.chart_vertex) == c]
        out = []
        for j in range(self.dim):
            # the facet dual to edge j vanishes on every other edge direction
            match = [i for i in tight
                     if all(dot(self.polytope.facets[i][0],
                                self.edge_directions[m]) == 0
                            for m in range(self.dim) if m != j)]
            if len(match) != 1:
                raise InvalidInput("chart facets are not in bijection with edges")
            out.append(match[0])
        return tuple(out)


def _lattice_points(poly, k):
    if k == 0:
        return [tuple(0 for _ in range(poly.dim))]
    n = poly.dim
    lo = [min(v[i] for v in poly.vertices) * k for i in range(n)]
    hi = [max(v[i] for v in poly.vertices) * k for i in range(n)]
    out = []

    def rec(prefix):
        i = len(prefix)
        if i == n:
            out.append(tuple(prefix))
            return
        for x in range(lo[i], hi[i] + 1):
            rec(prefix + [x])

    rec([])
    pts = [u for u in out
           if all(dot(a, u) >= k * c for a, c in poly.facets)]
    return sorted(pts)


def _facet_lattice_volume(poly, facet_index):
    """Lattice-normalized volume of a facet, an integer.

    The facet lives in an affine translate of the sublattice a-perp; a basis
    of that sublattice gives integer coordinates in which the normalized
    volume is (n-1)! times the Euclidean volume.
    """
    a, c = poly.facets[facet_index]
    on = [v for v in poly.vertices if dot(a, v) == c]
    n = poly.dim
    if n == 1:
        return 1
    basis = kernel_basis(a)
    p0 = on[0]
    cols = [list(b) for b in basis]
    flat = []
    for p in on:
        target = [x - y for x, y in zip(p, p0)]
        sol = solve_unique(cols, target)
        if sol is None:
            raise InvalidInput("facet vertex outside facet lattice span")
        assert all(x.denominator == 1 for x in sol)
        flat.append(tuple(int(x) for x in sol))
    vol = volume_of_points(flat, n - 1)
    f = 1
    for i in range(2, n):
        f *= i
    norm = vol * f
    assert norm.denominator == 1
    return int(norm)


def _intersection_numbers(poly):
    n = poly.dim
    vol = volume_of_points(list(poly.vertices), n)
    f = 1
    for i in range(2, n + 1):
        f *= i
    ln = vol * f
    assert ln.denominator == 1
    # each boundary divisor meets L^(n-1) in its facet's normalized volume
    boundary = sum(_facet_lattice_volume(poly, i) for i in range(len(poly.facets)))
    return int(ln), -boundary


def _edge_directions(poly, v0):
    """Primitive generators of the edges of P at the vertex v0."""
    n = poly.dim
    tight = [a for a, c in poly.facets if dot(a, v0) == c]
    others = [v for v in poly.vertices if v != v0]
    dirs = set()
    if n == 1:
        w = others[0][0] - v0[0]
        return ((1 if w > 0 else -1,),)
    for sub in combinations(range(len(tight)), n - 1):
        rows = [list(tight[i]) for i in sub]
        d = nullspace_primitive(rows, n)
        if d is None:
            continue
        for cand in (d, tuple(-x for x in d)):
            if all(dot(a, cand) >= 0 for a in tight) and \
                    any(dot(a, cand) > 0 for a in tight):
                # feasible direction along the cone's edge
                dirs.add(cand)
    # keep only genuine edge directions: those moving along an edge of P;
    # descending order makes the frame at the origin of the stock
    # polytopes the identity
    out = []
    for d in sorted(dirs, reverse=True):
        zero = [a for a in tight if dot(a, d) == 0]
        if len(zero) >= n - 1 and _spans_hyperplane(zero, n):
            out.append(d)
    return tuple(out)


def _spans_hyperplane(normals, n):
    return rank([list(a) for a in normals]) == n - 1


def make_variety(vertices, chart_vertex=None):
    """Validate a vertex list and package it with a chart at one vertex.

    The vertex list must consist of lattice points, span the ambient space,
    and contain no point interior to the hull of the others.  The chart
    vertex (default: lexicographically smallest vertex) must be smooth,
    i.e. the primitive edge directions there must form a lattice basis.
    """
    pts = []
    for v in vertices:
        t = tuple(v)
        for x in t:
            if int(x) != x:
                raise NonLatticeVertex("vertex %r has a non-integer entry" % (t,))
        pts.append(tuple(int(x) for x in t))
    if not pts:
        raise InvalidInput("empty vertex list")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise InvalidInput("vertices of mixed dimension")
    uniq = sorted(set(pts))
    p0 = uniq[0]
    if len(uniq) < n + 1 or rank([[x - y for x, y in zip(p, p0)] for p in uniq[1:]]) < n:
        raise NotFullDimensional("vertices do not span dimension %d" % n)
    ext = extreme_points(uniq)
    if set(ext) != set(uniq):
        raise InconsistentVertices(
            "points %r are not vertices of the hull" %
            (sorted(set(uniq) - set(ext)),))
    facets = tuple((f.normal, f.offset) for f in facets_of_points(uniq))
    poly = LatticePolytope(dim=n, vertices=tuple(uniq), facets=facets)

    v0 = tuple(int(x) for x in chart_vertex) if chart_vertex is not None else uniq[0]
    if v0 not in uniq:
        raise InvalidInput("chart vertex %r is not a vertex" % (v0,))
    dirs = _edge_directions(poly, v0)
    if len(dirs) != n or abs(det([list(d) for d in dirs])) != 1:
        raise NonUnimodularChartVertex(
            "cone at %r is not a smooth chart" % (v0,))
    mat = [[dirs[j][i] for j in range(n)] for i in range(n)]  # columns = dirs
    u = integer_inverse(mat)
    smooth = all(_vertex_is_smooth(poly, v) for v in poly.vertices)
    return PolarizedToricVariety(
        polytope=poly,
        chart_vertex=v0,
        edge_directions=dirs,
        chart_matrix=u,
        smooth=smooth,
    )


def _vertex_is_smooth(poly, v):
    dirs = _edge_directions(poly, v)
    if len(dirs) != poly.dim:
        return False
    return abs(det([list(d) for d in dirs])) == 1


# ---------------------------------------------------------------------------
# small library of stock polytopes

def projective_space(n, d=1):
    """d-fold dilated standard simplex: projective n-space with O(d)."""
    if n < 1 or d < 1:
        raise InvalidInput("need n >= 1 and d >= 1")
    verts = [tuple(0 for _ in range(n))]
    for i in range(n):
        verts.append(tuple(d if j == i else 0 for j in range(n)))
    return make_variety(verts, tuple(0 for _ in range(n)))


def box(sides):
    """Product of segments: (P^1)^n with the product polarization."""
    sides = tuple(int(s) for s in sides)
    if any(s < 1 for s in sides):
        raise InvalidInput("side lengths must be positive")
    n = len(sides)
    verts = []
    for mask in range(1 << n):
        verts.append(tuple(sides[i] if (mask >> i) & 1 else 0 for i in range(n)))
    return make_variety(verts, tuple(0 for _ in range(n)))


def hirzebruch_anticanonical():
    """First Hirzebruch surface with its anticanonical polarization."""
    return make_variety([(0, 0), (1, 0), (3, 2), (0, 2)], (0, 0))
