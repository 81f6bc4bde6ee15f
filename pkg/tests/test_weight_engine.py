"""Tests for the weight counting pipeline: fitting, pins, identities."""

from fractions import Fraction

import pytest

from dflab.errors import ConsistencyError, ExponentTooSmall, NotStabilized
from dflab.lattice_geometry import (
    box,
    hirzebruch_anticanonical,
    projective_space,
)
from dflab.monomial_algebra import FlagIdeal, MonomialIdeal, validate_flag_ideal
from dflab.weight_engine import (
    DFReport,
    ExactPolynomial,
    FitOptions,
    chow_number,
    closure_weight_at,
    df_counting,
    df_from_fits,
    evaluate,
    fit_polynomial,
    hilbert_at,
    hilbert_polynomial,
    mabuchi_check,
    weight_at,
    weight_sequence,
)


def flag_of(gens_per_level, nvars, mode="chart", variety=None):
    ideals = [MonomialIdeal.make(nvars, gens) for gens in gens_per_level]
    return validate_flag_ideal(ideals, mode=mode, variety=variety)


# ---------------------------------------------------------------------------
# ExactPolynomial

def test_polynomial_evaluation_and_coefficients():
    p = ExactPolynomial((Fraction(1), Fraction(-2), Fraction(3)), k0=1)
    assert p(0) == 1
    assert p(Fraction(1, 2)) == Fraction(3, 4)
    assert p.degree == 2
    assert p.coefficient(1) == -2
    # out-of-range coefficients read as zero, no exceptions
    assert p.coefficient(7) == 0


def test_polynomial_json_shape():
    p = ExactPolynomial((Fraction(0), Fraction(-1, 3)), k0=2)
    assert p.to_json() == {"coefficients": ["0", "-1/3"], "valid_from": 2}


# ---------------------------------------------------------------------------
# fit_polynomial

def test_fit_recovers_cubic():
    poly = lambda k: 2 * k ** 3 - 5 * k + 7
    samples = {k: poly(k) for k in range(1, 9)}
    fit = fit_polynomial(samples, 3)
    assert fit.coeffs == (Fraction(7), Fraction(-5), Fraction(0), Fraction(2))
    assert fit.k0 == 1
    assert fit(11) == poly(11)


def test_fit_trims_trailing_zero_coefficients():
    samples = {k: 4 * k + 1 for k in range(0, 8)}
    fit = fit_polynomial(samples, 3)
    assert fit.coeffs == (Fraction(1), Fraction(4))
    assert fit.degree == 1


def test_fit_finds_stabilization_onset():
    # eventual polynomial: exact from k=3 onward only
    samples = {k: k * k for k in range(1, 10)}
    samples[1] = 100
    samples[2] = -4
    fit = fit_polynomial(samples, 2)
    assert fit.coeffs == (Fraction(0), Fraction(0), Fraction(1))
    assert fit.k0 == 3


def test_fit_rejects_gaps():
    with pytest.raises(ValueError):
        fit_polynomial({1: 1, 2: 4, 4: 16, 5: 25, 6: 36, 7: 49}, 2)


def test_fit_needs_enough_samples():
    with pytest.raises(NotStabilized) as exc:
        fit_polynomial({1: 1, 2: 2, 3: 3}, 2)
    assert exc.value.hint == "extend_k_range"


def test_fit_reports_unstabilized_growth():
    samples = {k: 2 ** k for k in range(1, 9)}
    with pytest.raises(NotStabilized) as exc:
        fit_polynomial(samples, 2)
    assert exc.value.hint == "extend_k_range"
    assert exc.value.quasi_period is None


# Weight counts of (x^2)+(t) on the degree-1 line: the section space is too
# short for the exceptional exponent, so the counts split by parity.  Values
# frozen from the closed form -sum_u max(0, k - floor(u/2)) over 0 <= u <= k.
PARITY_SPLIT_COUNTS = {
    1: -2, 2: -5, 3: -10, 4: -16, 5: -24, 6: -33,
    7: -44, 8: -56, 9: -70, 10: -85, 11: -102, 12: -120,
}


def test_fit_diagnoses_quasi_polynomial_period_two():
    with pytest.raises(NotStabilized) as exc:
        fit_polynomial(PARITY_SPLIT_COUNTS, 2)
    assert exc.value.hint == "quasi_polynomial"
    assert exc.value.quasi_period == 2


def test_quasi_sequence_matches_live_counts():
    v = projective_space(1, 1)
    flag = flag_of([[(2,)]], 1)
    seq = weight_sequence(v, flag, 1, range(1, 8))
    assert seq == {k: PARITY_SPLIT_COUNTS[k] for k in range(1, 8)}


# ---------------------------------------------------------------------------
# weight and closure samples

def test_weight_pins_on_the_line():
    v2 = projective_space(1, 2)
    flag = flag_of([[(2,)]], 1)
    assert [weight_at(v2, flag, 1, k) for k in (1, 2, 3)] == [-2, -6, -12]

    v1 = projective_space(1, 1)
    assert weight_at(v1, flag_of([[(1,)]], 1), 1, 2) == -3


def test_closure_weight_agrees_on_integrally_closed_flag():
    v = projective_space(1, 1)
    flag = flag_of([[(1,)]], 1)
    for k in range(1, 5):
        assert closure_weight_at(v, flag, 1, k) == weight_at(v, flag, 1, k)


def test_closure_weight_detects_gap():
    # (x^2) + (x^2) t + (t^2): powers miss the odd half of the hull
    v = projective_space(1, 2)
    flag = flag_of([[(2,)], [(2,)]], 1)
    for k in range(1, 5):
        assert weight_at(v, flag, 1, k) == -2 * k * k - 2 * k
        assert closure_weight_at(v, flag, 1, k) == -2 * k * k - k


# ---------------------------------------------------------------------------
# Hilbert fits

def test_hilbert_polynomial_pins():
    assert hilbert_polynomial(projective_space(2, 2), 1).coeffs == (
        Fraction(1), Fraction(3), Fraction(2))
    assert hilbert_polynomial(box((1, 1)), 1).coeffs == (
        Fraction(1), Fraction(2), Fraction(1))
    assert hilbert_polynomial(hirzebruch_anticanonical(), 1).coeffs == (
        Fraction(1), Fraction(4), Fraction(4))
    # r enters through the dilation factor
    assert hilbert_polynomial(projective_space(1, 3), 2).coeffs == (
        Fraction(1), Fraction(6))


def test_hilbert_at_is_a_plain_count():
    v = projective_space(2, 2)
    assert hilbert_at(v, 2, 1) == v.ehrhart_count(2)


# ---------------------------------------------------------------------------
# invariants from fits

def test_chow_number_pins():
    r0 = df_counting(projective_space(1, 1), flag_of([[(1,)]], 1), 1)
    assert r0.chow == 0
    r1 = df_counting(projective_space(1, 2), flag_of([[(2,)]], 1), 1)
    assert r1.chow == 1
    # same numbers by hand from the fitted data
    assert chow_number(r1.weight_poly, r1.hilbert_poly, 1) == (
        r1.hilbert_poly(1) * r1.weight_poly.coefficient(2)
        - r1.weight_poly(1) * r1.hilbert_poly.coefficient(1))


def test_df_matches_coefficient_formula():
    rep = df_counting(projective_space(2, 2), flag_of([[(2, 0), (0, 2)]], 2), 1)
    w, h = rep.weight_poly, rep.hilbert_poly
    assert rep.df == w.coefficient(3) * h.coefficient(1) - \
        w.coefficient(2) * h.coefficient(2)
    assert rep.df == df_from_fits(w, h, 2)
    assert rep.df == 2


# ---------------------------------------------------------------------------
# two-parameter identity

def test_mabuchi_identity_grid():
    rep = df_counting(projective_space(1, 2), flag_of([[(2,)]], 1), 1)
    for k in (2, 4, 6):
        for kp in (2, 3):
            assert mabuchi_check(rep.weight_poly, rep.hilbert_poly, 1, k, kp)


def test_mabuchi_identity_grid_r2():
    v = projective_space(2, 2)
    rep = df_counting(v, flag_of([[(3, 0), (0, 3)]], 2), 2)
    for k in (2, 4):
        for kp in (2, 3):
            assert mabuchi_check(rep.weight_poly, rep.hilbert_poly, 2, k, kp)


def test_mabuchi_requires_divisible_arguments():
    rep = df_counting(projective_space(1, 2), flag_of([[(2,)]], 1), 1)
    with pytest.raises(ValueError):
        mabuchi_check(rep.weight_poly, rep.hilbert_poly, 2, 3, 2)


def test_two_parameter_weight_leading_coefficient():
    # T(K) = A(K) r h(1) - A(1) r K h(K) has degree n+1 and its top
    # coefficient is r times the chow number
    cases = [
        (projective_space(1, 2), flag_of([[(2,)]], 1), 1),
        (projective_space(2, 2), flag_of([[(2, 0), (0, 2)]], 2), 1),
        (projective_space(2, 2), flag_of([[(3, 0), (0, 3)]], 2), 2),
    ]
    for v, flag, r in cases:
        n = v.dim
        rep = df_counting(v, flag, r)
        a = list(rep.weight_poly.coeffs) + [Fraction(0)] * 3
        h = list(rep.hilbert_poly.coeffs) + [Fraction(0)] * 3
        t = [rep.hilbert_poly(1) * r * a[i] for i in range(n + 3)]
        for i in range(n + 2):
            t[i + 1] -= rep.weight_poly(1) * r * h[i]
        assert t[n + 2] == 0
        assert t[n + 1] == r * rep.chow


# ---------------------------------------------------------------------------
# shift law

def test_global_t_power_shifts_weight_by_count():
    v = projective_space(1, 2)
    flag = flag_of([[(2,)]], 1)
    shifted = FlagIdeal(
        nvars=1, mode="chart",
        chain=(MonomialIdeal.zero(1), MonomialIdeal.make(1, [(2,)])),
        support="point", t_power=0)
    for k in range(1, 7):
        assert weight_at(v, shifted, 1, k) == \
            weight_at(v, flag, 1, k) - k * hilbert_at(v, 1, k)
    base = df_counting(v, flag, 1)
    moved = df_counting(v, shifted, 1)
    assert moved.df == base.df == 1
    assert moved.chow == base.chow


def test_check_battery_flags():
    rep = df_counting(projective_space(1, 2), flag_of([[(2,)]], 1), 1)
    assert rep.checks == {
        "weak_riemann_roch": True,
        "base_weight_vanishes": True,
        "mabuchi_identity": True,
        "chow_scaling": True,
        "degree_bound": True,
    }


# ---------------------------------------------------------------------------
# counting driver

def test_trivial_flag_reports_zero():
    rep = df_counting(projective_space(2, 1), flag_of([[(0, 0)]], 2), 1)
    assert rep.trivial
    assert rep.df == 0
    assert rep.chow == 0
    assert rep.weight_poly(7) == 0
    assert rep.checks["base_weight_vanishes"]


def test_counting_detects_quasi_regime():
    v = projective_space(1, 1)
    flag = flag_of([[(2,)]], 1)
    with pytest.raises(NotStabilized) as exc:
        df_counting(v, flag, 1)
    assert exc.value.hint == "quasi_polynomial"
    assert exc.value.quasi_period == 2
    # doubling r restores the polynomial regime
    rep = df_counting(v, flag, 2)
    assert rep.df == 1
    assert rep.notes == []
    assert rep.integrally_closed


def test_fit_window_cap_is_respected():
    v = projective_space(1, 1)
    flag = flag_of([[(1,)]], 1)
    with pytest.raises(NotStabilized):
        df_counting(v, flag, 1, FitOptions(window=(1, 4), cap=4))
    rep = df_counting(v, flag, 1, FitOptions(window=(1, 4), cap=12))
    assert rep.df == 0


def test_closure_fit_on_open_flag():
    v = projective_space(1, 2)
    rep = df_counting(v, flag_of([[(2,)], [(2,)]], 1), 1)
    assert rep.df == 2
    assert rep.integrally_closed is False
    assert rep.closure_df == 0


# ---------------------------------------------------------------------------
# merged evaluation

def test_evaluate_rejects_unknown_pipeline():
    v = projective_space(1, 2)
    with pytest.raises(ValueError):
        evaluate(v, flag_of([[(2,)]], 1), 1, pipeline="fast")


def test_evaluate_counting_diagnosis_takes_precedence():
    # at r=1 both pipelines fail; the quasi diagnosis must surface
    v = projective_space(1, 1)
    flag = flag_of([[(2,)]], 1)
    with pytest.raises(NotStabilized) as exc:
        evaluate(v, flag, 1, pipeline="both")
    assert exc.value.hint == "quasi_polynomial"
    with pytest.raises(ExponentTooSmall):
        evaluate(v, flag, 1, pipeline="intersection")
    rep = evaluate(v, flag, 2, pipeline="both")
    assert rep.df == 1
    assert rep.consistent is True


def test_evaluate_merges_pipelines():
    v = projective_space(2, 2)
    rep = evaluate(v, flag_of([[(2, 0), (0, 2), (1, 1)]], 2), 1)
    assert rep.pipeline == "both"
    assert rep.df == 1
    assert rep.consistent is True
    assert rep.integrally_closed is True
    assert rep.closure_df == 1
    assert rep.decomposition is not None
    assert rep.decomposition.df == rep.df


def test_evaluate_open_flag_keeps_both_values():
    v = projective_space(2, 2)
    rep = evaluate(v, flag_of([[(2, 0), (0, 2)]], 2), 1)
    assert rep.df == 2
    assert rep.decomposition.df == 1
    assert rep.closure_df == 1
    assert rep.integrally_closed is False
    assert rep.consistent is True


def test_evaluate_cox_flag_skips_intersection():
    v = hirzebruch_anticanonical()
    # variable 2 cuts out the rigid curve with selfintersection -1
    flag = flag_of([[(0, 0, 2, 0)], [(0, 0, 1, 0)]], 4,
                   mode="cox", variety=v)
    rep = evaluate(v, flag, 1, pipeline="both")
    assert rep.df == Fraction(-4, 3)
    assert rep.consistent is None
    assert any("intersection pipeline unavailable" in n for n in rep.notes)


def test_report_json_shape():
    v = projective_space(1, 2)
    rep = evaluate(v, flag_of([[(2,)]], 1), 1)
    doc = rep.to_json_dict()
    assert doc["DF"] == "1"
    assert doc["r"] == 1
    assert doc["pipeline"] == "both"
    assert doc["normalization"] == "A[n+1]*h[n-1] - A[n]*h[n]"
    assert doc["trivial"] is False
    assert doc["integrally_closed"] is True
    assert doc["consistent"] is True
    assert doc["closure_DF"] == "1"
    assert doc["weight_polynomial"]["coefficients"] == ["0", "-1", "-1"]
    assert doc["hilbert_polynomial"]["coefficients"] == ["1", "2"]
    assert doc["chow"] == "1"
    assert set(doc["checks"]) == {
        "base_weight_vanishes", "chow_scaling", "degree_bound",
        "mabuchi_identity", "weak_riemann_roch"}
    assert all(isinstance(x, bool) for x in doc["checks"].values())
    assert doc["decomposition"]["DF"] == "1"


def test_evaluate_raises_on_tampered_leading_term(monkeypatch):
    # corrupt the counting fit behind evaluate's back; the cross check
    # against the hull integral must catch it
    import dflab.weight_engine as we

    v = projective_space(1, 2)
    flag = flag_of([[(2,)]], 1)
    rep = df_counting(v, flag, 1)
    rep.weight_poly = ExactPolynomial(
        rep.weight_poly.coeffs[:-1] + (rep.weight_poly.coeffs[-1] + 1,),
        rep.weight_poly.k0)
    monkeypatch.setattr(we, "df_counting", lambda *a, **k: rep)
    with pytest.raises(ConsistencyError):
        evaluate(v, flag, 1, pipeline="both")


def test_evaluate_raises_when_counting_undershoots(monkeypatch):
    # a counting value below the closed formula violates the lower bound
    import dflab.weight_engine as we

    v = projective_space(1, 2)
    flag = flag_of([[(2,)]], 1)
    rep = df_counting(v, flag, 1)
    rep.df = rep.df - 1
    rep.integrally_closed = None
    rep.closure_df = None
    monkeypatch.setattr(we, "df_counting", lambda *a, **k: rep)
    with pytest.raises(ConsistencyError):
        evaluate(v, flag, 1, pipeline="both")
