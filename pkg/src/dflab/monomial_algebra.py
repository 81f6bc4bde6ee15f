"""Monomial ideals, flag ideals, and the graded pieces of their powers.

A flag ideal J = I_0 + I_1 t + ... + I_{N-1} t^{N-1} + (t^N) packages an
increasing chain of monomial ideals into an ideal on the product with an
affine line.  The quantity everything downstream consumes is the level
function g_k(u): the least power of t that puts x^u t^j inside J^k.

Ideals come in two flavours.  "chart" ideals live in the coordinate ring
of the fixed affine chart; "cox" ideals live in the total coordinate ring
of a smooth variety, one variable per polytope facet, and membership is
tested chart by chart (invert the variables away from each vertex).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ChainViolation,
    InvalidInput,
    NonPositiveExceptionalRay,
    UnsupportedMode,
)
from .hull import extreme_points, facets_of_points
from .intlinalg import dot


def minimalize(gens):
    """Minimal generating set: drop exponents dominated coordinatewise."""
    gens = sorted(set(tuple(int(x) for x in g) for g in gens),
                  key=lambda g: (sum(g), g))
    out = []
    for g in gens:
        if not any(all(x >= y for x, y in zip(g, h)) for h in out):
            out.append(g)
    return tuple(out)


@dataclass(frozen=True)
class MonomialIdeal:
    nvars: int
    gens: tuple   # minimal generators, sorted by (total degree, lex)

    @staticmethod
    def make(nvars, gens):
        gens = [tuple(int(x) for x in g) for g in gens]
        for g in gens:
            if len(g) != nvars:
                raise InvalidInput("generator %r has wrong arity" % (g,))
            if any(x < 0 for x in g):
                raise InvalidInput("generator %r has a negative exponent" % (g,))
        return MonomialIdeal(nvars, minimalize(gens))

    @staticmethod
    def zero(nvars):
        return MonomialIdeal(nvars, ())

    @staticmethod
    def unit(nvars):
        return MonomialIdeal(nvars, (tuple(0 for _ in range(nvars)),))

    @property
    def is_zero(self):
        return not self.gens

    @property
    def is_unit(self):
        return bool(self.gens) and all(x == 0 for x in self.gens[0])

    def contains(self, mono):
        return any(all(x >= y for x, y in zip(mono, g)) for g in self.gens)

    def contains_on(self, mono, idxs):
        """Containment after inverting all variables not listed in idxs."""
        return any(all(mono[i] >= g[i] for i in idxs) for g in self.gens)

    def includes(self, other):
        """True when self contains other as an ideal."""
        return all(self.contains(g) for g in other.gens)

    def includes_on(self, other, idxs):
        return all(self.contains_on(g, idxs) for g in other.gens)

    def product(self, other):
        if self.is_zero or other.is_zero:
            return MonomialIdeal.zero(self.nvars)
        return MonomialIdeal(self.nvars, minimalize(
            tuple(x + y for x, y in zip(a, b))
            for a in self.gens for b in other.gens))

    def sum(self, other):
        return MonomialIdeal(self.nvars, minimalize(self.gens + other.gens))


@dataclass(frozen=True)
class FlagIdeal:
    nvars: int
    mode: str        # "chart" or "cox"
    chain: tuple     # (I_0, ..., I_{N-1}), increasing, I_0 nonzero, I_{N-1} non-unit
    support: str     # "point", "general", or "trivial"
    t_power: int     # number of leading zero ideals stripped off

    @property
    def big_n(self):
        return len(self.chain)

    @property
    def trivial(self):
        return not self.chain


def _pure_power_support(ideal, idxs=None):
    """True when, restricted to the listed variables, the ideal contains a
    pure power of each of them (other variables are treated as invertible)."""
    idxs = tuple(range(ideal.nvars)) if idxs is None else tuple(idxs)
    for i in idxs:
        if not any(g[i] > 0 and all(g[j] == 0 for j in idxs if j != i)
                   for g in ideal.gens):
            return False
    return True


def _classify_support(mode, chain, variety):
    if mode == "chart":
        return "point" if all(_pure_power_support(i) for i in chain) else "general"
    point = True
    for chart in variety.maximal_charts():
        for ideal in chain:
            if ideal.includes_on(MonomialIdeal.unit(ideal.nvars), chart):
                continue
            if not _pure_power_support(ideal, chart):
                point = False
    return "point" if point else "general"


def validate_flag_ideal(ideals, mode="chart", variety=None):
    """Normalize a chain of monomial ideals into a FlagIdeal.

    Leading zero ideals are stripped (their count is recorded as a power
    of t multiplying the whole ideal, which shifts weights but not the
    invariant).  Trailing entries equal to the unit ideal are absorbed
    into a shorter chain.  An empty or everywhere-unit result is the
    trivial configuration, reported as a flag rather than an error.
    """
    if mode not in ("chart", "cox"):
        raise InvalidInput("unknown mode %r" % (mode,))
    if mode == "cox" and variety is None:
        raise InvalidInput("cox mode needs the variety for chart data")
    ideals = list(ideals)
    if not ideals:
        raise InvalidInput("empty ideal chain")
    nvars = ideals[0].nvars
    if any(i.nvars != nvars for i in ideals):
        raise InvalidInput("ideal chain has mixed variable counts")
    if mode == "cox" and nvars != len(variety.polytope.facets):
        raise InvalidInput("cox ideals need one variable per facet")

    t_power = 0
    while ideals and ideals[0].is_zero:
        ideals.pop(0)
        t_power += 1
    if not ideals:
        return FlagIdeal(nvars, mode, (), "trivial", t_power)

    def is_sheaf_unit(ideal):
        if mode == "chart":
            return ideal.is_unit
        return all(ideal.includes_on(MonomialIdeal.unit(nvars), chart)
                   for chart in variety.maximal_charts())

    def includes(a, b):
        if mode == "chart":
            return a.includes(b)
        return all(a.includes_on(b, chart) for chart in variety.maximal_charts())

    for prev, cur in zip(ideals, ideals[1:]):
        if not includes(cur, prev):
            raise ChainViolation("ideal chain is not increasing")

    while ideals and is_sheaf_unit(ideals[-1]):
        ideals.pop()
    if not ideals:
        # unit chain: J is a pure power of t
        return FlagIdeal(nvars, mode, (), "trivial", t_power)

    chain = tuple(ideals)
    support = _classify_support(mode, chain, variety)
    return FlagIdeal(nvars, mode, chain, support, t_power)


# ---------------------------------------------------------------------------
# graded pieces of powers

_ROWS_CACHE = {}


def _chain_key(flag):
    return (flag.nvars, tuple(i.gens for i in flag.chain))


def _chain_rows(flag, k):
    """rows[j] = generators of the degree-(k, j) piece of J^k for 0 <= j <= kN.

    The piece at level j is the sum over (j_1, ..., j_k) with sum <= j of
    I_{j_1} ... I_{j_k}, where I_j is the unit ideal for j >= N.  Rows are
    cumulative in j by construction.
    """
    key = _chain_key(flag)
    per = _ROWS_CACHE.setdefault(key, {})
    if k in per:
        return per[k]
    n = flag.nvars
    big_n = flag.big_n
    unit = MonomialIdeal.unit(n)
    chain = list(flag.chain) + [unit]

    def ideal_at(j):
        return chain[min(j, big_n)]

    if k == 1:
        rows = [ideal_at(j) for j in range(big_n + 1)]
        per[1] = rows
        return rows
    prev = _chain_rows(flag, k - 1)
    top_prev = len(prev) - 1
    rows = []
    for j in range(k * big_n + 1):
        acc = rows[-1] if rows else MonomialIdeal.zero(n)
        for b in range(0, min(j, big_n) + 1):
            left = prev[min(j - b, top_prev)]
            if left.is_zero:
                continue
            acc = acc.sum(left.product(ideal_at(b)))
        rows.append(acc)
    per[k] = rows
    return rows


def graded_piece(flag, k, j):
    """Monomial ideal of x-exponents u with x^u t^j in J^k."""
    if flag.trivial:
        n = flag.nvars
        return MonomialIdeal.unit(n) if j >= 0 else MonomialIdeal.zero(n)
    rows = _chain_rows(flag, k)
    if j < 0:
        return MonomialIdeal.zero(flag.nvars)
    return rows[min(j, len(rows) - 1)]


def level_of_membership(flag, k, y):
    """Least j with x^y t^j in J^k, for chart coordinates y; None never occurs
    because the top row is the unit ideal."""
    rows = _chain_rows(flag, k)
    lo, hi = 0, len(rows) - 1
    if rows[lo].contains(y):
        return 0
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if rows[mid].contains(y):
            hi = mid
        else:
            lo = mid
    return hi


def _level_on_chart(rows, y, chart):
    lo, hi = 0, len(rows) - 1
    if rows[lo].contains_on(y, chart):
        return 0
    if not rows[hi].contains_on(y, chart):
        return None
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if rows[mid].contains_on(y, chart):
            hi = mid
        else:
            lo = mid
    return hi


def t_degree(variety, flag, r, k, u):
    """g_k(u): least t-power putting the section at lattice point u of krP
    inside J^k.  The stripped chain is used; callers add k * t_power for
    the unnormalized ideal."""
    if flag.trivial:
        return 0
    if flag.mode == "chart":
        if flag.support != "point":
            raise UnsupportedMode(
                "chart-mode counting needs ideals supported at the chart point")
        y = variety.chart_coords(u, k * r)
        return level_of_membership(flag, k, y)
    if not variety.smooth:
        raise UnsupportedMode("cox-mode counting needs a smooth polytope")
    e = variety.cox_exponents(u, k * r)
    rows = _chain_rows(flag, k)
    best = 0
    for chart in variety.maximal_charts():
        lvl = _level_on_chart(rows, e, chart)
        if lvl is None:
            return k * flag.big_n
        best = max(best, lvl)
    return best


# ---------------------------------------------------------------------------
# Newton polyhedron of the flag ideal in chart coordinates

@dataclass(frozen=True)
class ExceptionalFacet:
    normal: tuple      # primitive, all entries positive; last entry is the t-weight
    order: int         # min of <normal, p> over the support; the facet's level
    vertices: tuple    # hull vertices lying on the facet


@dataclass(frozen=True)
class NewtonPolyhedron:
    dim: int           # ambient dimension n + 1 (chart variables plus t)
    big_n: int
    vertices: tuple
    facets: tuple      # compact lower facets only


def phi_value(np_, x):
    """Support function of the lower hull: least s with (x, s) in the region.

    x may be rational; entries must be >= 0.  The value is max(0, ...) over
    the compact facets, exact as a Fraction.
    """
    if any(t < 0 for t in x):
        raise InvalidInput("phi is only defined on the nonnegative orthant")
    best = Fraction(0)
    for f in np_.facets:
        w = f.normal
        num = f.order - dot(w[:-1], x)
        if num > 0:
            val = Fraction(num, w[-1])
            if val > best:
                best = val
    return best


_NP_CACHE = {}


def newton_polyhedron(flag):
    """Compact lower facets of conv(support(J)) + nonnegative orthant.

    Defined for chart-mode, point-supported flags; the compact facets then
    cut out the region exactly, which is what the integral formulas need.
    """
    key = (_chain_key(flag), flag.mode, flag.support)
    if key in _NP_CACHE:
        return _NP_CACHE[key]
    if flag.trivial:
        np_ = NewtonPolyhedron(dim=flag.nvars + 1, big_n=0, vertices=(), facets=())
        _NP_CACHE[key] = np_
        return np_
    if flag.mode != "chart":
        raise UnsupportedMode("newton polyhedron is chart-mode only")
    if flag.support != "point":
        raise NonPositiveExceptionalRay(
            "support is not the chart point; some exceptional rays would "
            "have a non-positive entry and the compact facets would not "
            "determine the region")
    pts = set()
    for j, ideal in enumerate(flag.chain):
        for g in ideal.gens:
            pts.add(g + (j,))
    pts.add(tuple(0 for _ in range(flag.nvars)) + (flag.big_n,))
    facets = []
    for f in facets_of_points(sorted(pts), strictly_positive=True):
        assert f.offset > 0
        facets.append(ExceptionalFacet(
            normal=f.normal, order=int(f.offset),
            vertices=tuple(extreme_points(sorted(f.points)))))
    verts = tuple(extreme_points(sorted(
        p for f in facets for p in f.vertices)))
    np_ = NewtonPolyhedron(dim=flag.nvars + 1, big_n=flag.big_n,
                           vertices=verts, facets=tuple(facets))
    _NP_CACHE[key] = np_
    return np_


def cox_lift(variety, flag):
    """Chart-mode flag rewritten in total-coordinate variables.

    Pads each chart generator with zeros on the facets away from the chart
    vertex; exact for point-supported chains, where the associated sheaf
    is co-supported at the chart point.
    """
    if flag.mode != "chart":
        raise InvalidInput("cox_lift starts from a chart-mode flag")
    if flag.support != "point":
        raise UnsupportedMode("cox_lift needs a point-supported chain")
    nf = len(variety.polytope.facets)
    idx = variety.chart_facet_indices()
    lifted = []
    for ideal in flag.chain:
        gens = []
        for g in ideal.gens:
            e = [0] * nf
            for j, x in enumerate(g):
                e[idx[j]] = x
            gens.append(tuple(e))
        lifted.append(MonomialIdeal.make(nf, gens))
    return validate_flag_ideal(lifted, mode="cox", variety=variety)
