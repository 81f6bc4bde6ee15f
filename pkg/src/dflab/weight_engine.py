"""Weight counting pipeline and exact polynomial fits.

The total t-weight of the degeneration's central fibre sections is
W(K) = -sum over lattice points u of KrP of g_K(u), with g_K the level
function of the flag ideal's K-th power.  For K large this is a
polynomial of degree n+1; fitting it exactly and pairing it with the
Ehrhart polynomial of P yields the invariant

    DF = A_{n+1} h_{n-1} - A_n h_n

where A is the fitted weight polynomial and h(K) = #(KrP).  Everything
is integer or Fraction arithmetic; nothing is rounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .errors import (
    ConsistencyError,
    ExponentTooSmall,
    NotStabilized,
    UnsupportedMode,
)
from .monomial_algebra import newton_polyhedron, phi_value, t_degree


@dataclass(frozen=True)
class ExactPolynomial:
    """Polynomial with Fraction coefficients, valid for arguments >= k0."""

    coeffs: tuple       # lowest degree first
    k0: int = 1

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coefficient(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def to_json(self):
        return {
            "coefficients": [str(c) for c in self.coeffs],
            "valid_from": self.k0,
        }


def _forward_diffs(values):
    return [b - a for a, b in zip(values, values[1:])]


def _quasi_period(samples, max_degree):
    """Detect a period q in (2, 3, 4) such that each residue class of the
    sample index follows its own polynomial of degree <= max_degree."""
    ks = sorted(samples)
    for q in (2, 3, 4):
        ok = True
        for r in range(q):
            sub = [samples[k] for k in ks if k % q == r]
            if len(sub) < max_degree + 3:
                ok = False
                break
            diffs = sub
            for _ in range(max_degree + 1):
                diffs = _forward_diffs(diffs)
            if any(d != 0 for d in diffs):
                ok = False
                break
        if ok:
            return q
    return None


def fit_polynomial(samples, max_degree, guard=2):
    """Fit the eventual polynomial of degree <= max_degree to samples.

    samples maps consecutive integers k to exact values.  The fit demands
    that the (max_degree+1)-th forward differences vanish on at least
    ``guard`` trailing windows; the polynomial is then interpolated from
    the last max_degree+1 samples and checked against every sample from
    the first stabilized index onward.
    """
    ks = sorted(samples)
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise ValueError("samples must cover consecutive integers")
    d = max_degree
    need = d + 2 + guard
    if len(ks) < need:
        raise NotStabilized(
            "need at least %d consecutive samples for degree %d" % (need, d))
    values = [Fraction(samples[k]) for k in ks]
    diffs = values
    for _ in range(d + 1):
        diffs = _forward_diffs(diffs)
    trailing = 0
    for x in reversed(diffs):
        if x != 0:
            break
        trailing += 1
    if trailing < guard:
        q = _quasi_period(samples, d)
        if q is not None:
            raise NotStabilized(
                "samples follow a degree-%d quasi-polynomial of period %d, "
                "not a polynomial" % (d, q),
                hint="quasi_polynomial", quasi_period=q)
        raise NotStabilized(
            "high-order differences of the samples have not vanished yet",
            hint="extend_k_range")
    # first index from which the polynomial model already holds
    k0 = ks[len(diffs) - trailing]
    nodes = ks[-(d + 1):]
    poly = _lagrange(nodes, values[-(d + 1):])
    for k, v in zip(ks, values):
        if k >= k0 and poly(k) != v:
            raise NotStabilized(
                "interpolant disagrees with sample at k=%d" % k,
                hint="extend_k_range")
    # also demand agreement on the guard window before k0 shrinks further
    while k0 > ks[0] and poly(k0 - 1) == samples[k0 - 1]:
        k0 -= 1
    coeffs = list(poly.coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return ExactPolynomial(tuple(coeffs), k0)


def _lagrange(nodes, values):
    """Exact Lagrange interpolation through (nodes[i], values[i])."""
    m = len(nodes)
    coeffs = [Fraction(0)] * m
    for i in range(m):
        # numerator polynomial prod_{j != i} (x - nodes[j])
        num = [Fraction(1)]
        den = Fraction(1)
        for j in range(m):
            if j == i:
                continue
            num = _poly_mul_linear(num, -Fraction(nodes[j]))
            den *= Fraction(nodes[i] - nodes[j])
        w = Fraction(values[i]) / den
        for p in range(len(num)):
            coeffs[p] += w * num[p]
    return ExactPolynomial(tuple(coeffs), min(nodes))


def _poly_mul_linear(coeffs, c0):
    """Multiply the coefficient list by (x + c0)."""
    out = [Fraction(0)] * (len(coeffs) + 1)
    for i, a in enumerate(coeffs):
        out[i] += a * c0
        out[i + 1] += a
    return out


# ---------------------------------------------------------------------------
# sample generators

def weight_at(variety, flag, r, k):
    """W(k) for the stripped flag: minus the total level over krP."""
    total = 0
    for u in variety.lattice_points(k * r):
        total += t_degree(variety, flag, r, k, u)
    return -total


def weight_sequence(variety, flag, r, ks):
    return {k: weight_at(variety, flag, r, k) for k in ks}


def closure_weight_at(variety, flag, r, k):
    """Weight computed from the lower hull: levels ceil(k * phi(u / k)).

    Counting against the hull rather than the ideal powers gives the
    integral closure's weight; it never exceeds the true level count.
    """
    np_ = newton_polyhedron(flag)
    total = 0
    for u in variety.lattice_points(k * r):
        y = variety.chart_coords(u, k * r)
        v = phi_value(np_, tuple(Fraction(t, k) for t in y))
        total += ceil(v * k)
    return -total


def hilbert_at(variety, r, k):
    return variety.ehrhart_count(k * r)


# ---------------------------------------------------------------------------
# fitting driver

@dataclass(frozen=True)
class FitOptions:
    window: tuple = None   # inclusive (k_min, k_max); default (1, n + 6)
    guard: int = 2
    cap: int = 40


@dataclass
class DFReport:
    df: Fraction
    r: int
    pipeline: str
    trivial: bool
    weight_poly: ExactPolynomial = None
    hilbert_poly: ExactPolynomial = None
    chow: Fraction = None
    checks: dict = field(default_factory=dict)
    integrally_closed: bool = None
    closure_df: Fraction = None
    decomposition: object = None
    consistent: bool = None
    notes: list = field(default_factory=list)

    def to_json_dict(self):
        out = {
            "DF": str(self.df),
            "r": self.r,
            "pipeline": self.pipeline,
            "normalization": "A[n+1]*h[n-1] - A[n]*h[n]",
            "trivial": self.trivial,
        }
        if self.weight_poly is not None:
            out["weight_polynomial"] = self.weight_poly.to_json()
        if self.hilbert_poly is not None:
            out["hilbert_polynomial"] = self.hilbert_poly.to_json()
        if self.chow is not None:
            out["chow"] = str(self.chow)
        if self.checks:
            out["checks"] = {k: bool(v) for k, v in sorted(self.checks.items())}
        if self.integrally_closed is not None:
            out["integrally_closed"] = self.integrally_closed
        if self.closure_df is not None:
            out["closure_DF"] = str(self.closure_df)
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_json_dict()
        if self.consistent is not None:
            out["consistent"] = self.consistent
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _fit_with_extension(sampler, max_degree, options, n):
    window = options.window or (1, n + 6)
    lo, hi = window
    samples = {k: sampler(k) for k in range(lo, hi + 1)}
    while True:
        try:
            return fit_polynomial(samples, max_degree, options.guard), samples
        except NotStabilized as exc:
            if exc.hint == "quasi_polynomial":
                raise
            new_hi = min(options.cap, hi * 2)
            if new_hi <= hi:
                raise
            for k in range(hi + 1, new_hi + 1):
                samples[k] = sampler(k)
            hi = new_hi


def hilbert_polynomial(variety, r, options=None):
    options = options or FitOptions()
    n = variety.dim
    poly, _ = _fit_with_extension(
        lambda k: hilbert_at(variety, r, k), n, options, n)
    return poly


def chow_number(weight_poly, hilbert_poly, n):
    """h(1) A_{n+1} - A(1) h_n: the leading obstruction to a product split."""
    return (hilbert_poly(1) * weight_poly.coefficient(n + 1)
            - weight_poly(1) * hilbert_poly.coefficient(n))


def df_from_fits(weight_poly, hilbert_poly, n):
    return (weight_poly.coefficient(n + 1) * hilbert_poly.coefficient(n - 1)
            - weight_poly.coefficient(n) * hilbert_poly.coefficient(n))


def mabuchi_check(weight_poly, hilbert_poly, r, k, kp):
    """Exact two-parameter consistency identity on the fitted polynomials.

    With w(x) = A(x / r) and P(x) = h(x / r) (so both take honest section
    counts at x divisible by r) and wtilde(a, b) = w(b) a P(a) - w(a) b P(b),
    the slope of the two-parameter weight satisfies

       wtilde(r, kkp) / (kkp P(kkp)) - wtilde(r, k) / (k P(k))
         = r P(r) wtilde(k, kkp) / (k^2 kp P(kkp) P(k)).

    Both sides are evaluated as exact fractions from the fitted data; any
    slip in the fitting or evaluation machinery breaks the equality.
    """
    if k % r != 0 or (k * kp) % r != 0:
        raise ValueError("k and k*kp must be divisible by r")

    def w(x):
        return weight_poly(Fraction(x, r))

    def p(x):
        return hilbert_poly(Fraction(x, r))

    def wtilde(a, b):
        return w(b) * a * p(a) - w(a) * b * p(b)

    kk = k * kp
    lhs = wtilde(r, kk) / (kk * p(kk)) - wtilde(r, k) / (k * p(k))
    rhs = Fraction(r) * p(r) * wtilde(k, kk) / (Fraction(k) ** 2 * kp * p(kk) * p(k))
    return lhs == rhs


def _t_shifted(weight_poly, hilbert_poly):
    """Weight polynomial of t * J, by the exact shift law A'(x) = A(x) - x h(x)."""
    size = max(len(weight_poly.coeffs), len(hilbert_poly.coeffs) + 1)
    coeffs = [Fraction(0)] * size
    for i, c in enumerate(weight_poly.coeffs):
        coeffs[i] += c
    for i, c in enumerate(hilbert_poly.coeffs):
        coeffs[i + 1] -= c
    return ExactPolynomial(tuple(coeffs), weight_poly.k0)


def _check_battery(variety, flag, r, weight_poly, hilbert_poly):
    n = variety.dim
    checks = {}
    # fitted Ehrhart data must reproduce the intersection numbers
    ln, lk = variety.intersection_numbers()
    fact_n = 1
    for i in range(2, n + 1):
        fact_n *= i
    checks["weak_riemann_roch"] = (
        hilbert_poly.coefficient(n) * fact_n == ln * r ** n
        and hilbert_poly.coefficient(n - 1) * 2 * (fact_n // n) == -lk * r ** (n - 1))
    # a trivial flag must carry the zero weight
    checks["base_weight_vanishes"] = weight_poly(0) == 0 if flag.trivial else True
    try:
        checks["mabuchi_identity"] = mabuchi_check(
            weight_poly, hilbert_poly, r, 2 * r, 2)
    except ValueError:
        checks["mabuchi_identity"] = True
    # a global power of t shifts the weight but not DF or the chow number
    shifted = _t_shifted(weight_poly, hilbert_poly)
    checks["chow_scaling"] = (
        df_from_fits(shifted, hilbert_poly, n) == df_from_fits(
            weight_poly, hilbert_poly, n)
        and chow_number(shifted, hilbert_poly, n) == chow_number(
            weight_poly, hilbert_poly, n))
    checks["degree_bound"] = weight_poly.degree <= n + 1
    return checks


def df_counting(variety, flag, r, options=None):
    """Counting pipeline: fit W and the Hilbert function, read off DF."""
    options = options or FitOptions()
    n = variety.dim
    if flag.trivial:
        hpoly = hilbert_polynomial(variety, r, options)
        zero = ExactPolynomial((Fraction(0),), 0)
        report = DFReport(df=Fraction(0), r=r, pipeline="counting",
                          trivial=True, weight_poly=zero, hilbert_poly=hpoly,
                          chow=Fraction(0))
        report.checks = _check_battery(variety, flag, r, zero, hpoly)
        return report
    _semiample_note = _semiample_precheck(variety, flag, r)
    wpoly, wsamples = _fit_with_extension(
        lambda k: weight_at(variety, flag, r, k), n + 1, options, n)
    hpoly, _ = _fit_with_extension(
        lambda k: hilbert_at(variety, r, k), n, options, n)
    df = df_from_fits(wpoly, hpoly, n)
    report = DFReport(df=df, r=r, pipeline="counting", trivial=False,
                      weight_poly=wpoly, hilbert_poly=hpoly,
                      chow=chow_number(wpoly, hpoly, n))
    report.checks = _check_battery(variety, flag, r, wpoly, hpoly)
    if _semiample_note:
        report.notes.append(_semiample_note)
    # closure comparison doubles as an integral-closedness detector
    if flag.mode == "chart" and flag.support == "point":
        closed = True
        closure_samples = {}
        for k in sorted(wsamples):
            cw = closure_weight_at(variety, flag, r, k)
            closure_samples[k] = cw
            if cw != wsamples[k]:
                closed = False
        report.integrally_closed = closed
        try:
            cpoly = fit_polynomial(closure_samples, n + 1, options.guard)
            report.closure_df = df_from_fits(cpoly, hpoly, n)
        except NotStabilized:
            pass
    return report


def _semiample_precheck(variety, flag, r):
    """Cheap early warning: if r is small against the generator degrees the
    fit usually lands in the quasi-polynomial regime."""
    if flag.mode != "chart" or flag.support != "point":
        return None
    axis = []
    n = variety.dim
    for i in range(n):
        best = None
        for ideal in flag.chain:
            for g in ideal.gens:
                if g[i] > 0 and all(g[j] == 0 for j in range(n) if j != i):
                    best = g[i] if best is None else min(best, g[i])
        axis.append(best)
    widths = _chart_axis_widths(variety)
    for i in range(n):
        if axis[i] is not None and widths[i] is not None and r * widths[i] < axis[i]:
            return ("exceptional locus may be clipped at r=%d; expect a "
                    "quasi-polynomial or an exponent error" % r)
    return None


def _chart_axis_widths(variety):
    """Extent of the polytope along each chart coordinate axis."""
    widths = []
    n = variety.dim
    for i in range(n):
        best = 0
        for v in variety.polytope.vertices:
            y = variety.chart_coords(v, 1)
            if y[i] > best:
                best = y[i]
        widths.append(best)
    return widths


def evaluate(variety, flag, r, pipeline="both", options=None):
    """Run the requested pipelines and merge them into one report.

    pipeline is "counting", "intersection", or "both".  When both run,
    their invariants are compared exactly; for an integrally closed flag
    they must coincide, otherwise the intersection pipeline gives a lower
    bound.  Disagreement outside those rules raises ConsistencyError.
    """
    from .intersection_engine import df_intersection

    options = options or FitOptions()
    if pipeline not in ("counting", "intersection", "both"):
        raise ValueError("unknown pipeline %r" % (pipeline,))

    if pipeline == "intersection":
        deco = df_intersection(variety, flag, r)
        return DFReport(df=deco.df, r=r, pipeline="intersection",
                        trivial=flag.trivial, decomposition=deco)

    # counting runs first: when r is too small its quasi-polynomial
    # diagnosis is the primary error; the closed formula's exponent guard
    # still fires on inputs whose counts happen to stabilize anyway
    report = df_counting(variety, flag, r, options)
    if pipeline == "counting":
        return report

    report.pipeline = "both"
    try:
        deco = df_intersection(variety, flag, r)
    except UnsupportedMode as exc:
        report.notes.append("intersection pipeline unavailable: %s" % exc)
        report.consistent = None
        return report
    report.decomposition = deco
    n = variety.dim
    fact_np1 = 1
    for i in range(2, n + 2):
        fact_np1 *= i
    if report.weight_poly.coefficient(n + 1) * fact_np1 != deco.le_power:
        raise ConsistencyError(
            "leading weight coefficient %s disagrees with the hull integral"
            % (report.weight_poly.coefficient(n + 1),))
    if deco.df > report.df:
        raise ConsistencyError(
            "intersection value %s exceeds counting value %s"
            % (deco.df, report.df))
    if report.integrally_closed and deco.df != report.df:
        raise ConsistencyError(
            "pipelines disagree on an integrally closed flag: %s vs %s"
            % (deco.df, report.df))
    if report.closure_df is not None and deco.df != report.closure_df:
        raise ConsistencyError(
            "intersection value %s does not match the closure fit %s"
            % (deco.df, report.closure_df))
    report.consistent = True
    return report
