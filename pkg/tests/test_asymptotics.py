"""Degree bookkeeping, growth fits, and tail integrability verdicts.

Synthetic coefficient profiles pin down each degree pair without relying on
any particular surface: the verdicts must match what the polynomial degrees
predict, and the measured growth exponents must match the fitted ones.
"""

import numpy as np
import pytest

import layercert as lc
from layercert.asymptotics import (
    classify_degrees,
    dominance_scale,
    growth_classification,
    h2_integrability,
)
from layercert.charts import CoefficientProfile
from layercert.errors import InconclusiveFit


def _synthetic(n0, n1, n2, d1, d2):
    return CoefficientProfile.from_constants(n0=n0, n1=n1, n2=n2, d1=d1, d2=d2)


# name -> (profile factory or None for a catalog chart, deg_num, deg_det,
#          growth classification, h2 convergent)
CASES = {
    "num1_det2": (lambda: _synthetic(0.3, 0.7, 0.0, 1.1, 0.8), 1, 2, "sublinear", True),
    "num0_det2": (lambda: _synthetic(0.5, 0.0, 0.0, 1.1, 0.8), 0, 2, "sublinear", True),
    "num2_det2": (None, 2, 2, "polynomial", False),  # cone tail chart
    "num0_det0": (None, 0, 0, "polynomial", False),  # cylinder chart
    "num1_det0": (lambda: _synthetic(0.0, 0.4, 0.0, 0.0, 0.0), 1, 0, "polynomial", False),
}

SYNTH_WINDOW = (-1.0, 1.0)


def _profile(name, surfaces):
    factory = CASES[name][0]
    if factory is not None:
        return factory(), SYNTH_WINDOW
    surf = surfaces["capped_cone" if name == "num2_det2" else "cylinder"]
    lo, hi = surf.chart.s_range
    mid = 0.5 * (lo + hi)
    w = min(0.2 * (hi - lo), 1.0)
    return lc.coefficient_profile(surf.chart), (mid - w, mid + w)


def test_classify_degrees_all_cases(surfaces):
    for name, (_, dn, dd, _, _) in CASES.items():
        prof, win = _profile(name, surfaces)
        deg = classify_degrees(prof, win)
        assert deg.deg_num == dn, name
        assert deg.deg_det == dd, name
        assert deg.stable, name


def test_degenerate_numerator_degree():
    prof = _synthetic(0.0, 0.0, 0.0, 1.0, 0.5)
    deg = classify_degrees(prof, SYNTH_WINDOW)
    assert deg.deg_num == float("-inf")
    assert deg.sublinear_predicted


def test_growth_classification_both_directions(surfaces):
    # the fitted log-log class must match the degree prediction and the
    # fitted exponent must be the predicted one (both directions)
    for name, (_, dn, dd, kind, _) in CASES.items():
        prof, win = _profile(name, surfaces)
        t = max(dominance_scale(prof, win), 4.0)
        verdict = growth_classification(prof, win, t=t)
        assert verdict.classification == kind, (name, verdict)
        assert verdict.agrees, name
        assert verdict.residual < 0.05, (name, verdict.residual)
        if kind == "polynomial":
            n = dn - dd + 1
            assert verdict.degree == n, (name, verdict.degree)
            assert abs(verdict.exponent - n) < 0.25, (name, verdict.exponent)


def test_h2_integrability_matches_degrees(surfaces):
    for name, (_, dn, dd, _, convergent) in CASES.items():
        prof, win = _profile(name, surfaces)
        rep = h2_integrability(prof, win)
        assert (rep.verdict == "convergent") == convergent, (name, rep)
        assert rep.agrees, name


def test_h2_cone_diverges_at_log_rate(surfaces):
    prof, win = _profile("num2_det2", surfaces)
    rep = h2_integrability(prof, win)
    assert rep.verdict == "divergent"
    assert rep.rate == "log"


def test_h2_cylinder_diverges_polynomially(surfaces):
    prof, win = _profile("num0_det0", surfaces)
    rep = h2_integrability(prof, win)
    assert rep.verdict == "divergent"
    assert rep.rate == "polynomial"


def test_h2_convergent_truncations_settle():
    prof = _synthetic(0.3, 0.7, 0.0, 1.1, 0.8)
    rep = h2_integrability(prof, SYNTH_WINDOW)
    # integrand ~ 1/v^3, so the last truncation increments are ~1/V^2
    scale = max(1.0, abs(rep.values[-1]))
    assert abs(rep.values[-1] - rep.values[-2]) <= 1e-5 * scale


def test_h2_inconclusive_when_degrees_disagree():
    # d2 just above the zero threshold: degrees predict convergence but the
    # det barely grows over the probed truncations, so they look divergent
    prof = _synthetic(1.0, 0.0, 0.0, 0.0, 1e-8)
    deg = classify_degrees(prof, SYNTH_WINDOW)
    assert deg.deg_det == 2  # structurally quadratic...
    with pytest.raises(InconclusiveFit):
        h2_integrability(prof, SYNTH_WINDOW)  # ...but numerically flat


def test_dominance_scale_waits_out_the_dip():
    dipped = dominance_scale(_synthetic(0.0, 0.0, 1.0, -1.2, 0.4), SYNTH_WINDOW)
    flat = dominance_scale(_synthetic(0.0, 0.0, 1.0, 0.0, 0.4), SYNTH_WINDOW)
    assert flat == 1.0
    assert dipped > flat


def test_helicoid_profile_is_sublinear(surfaces):
    # num degree <= 1 vs det degree 2: bounded tail energy on each generator
    surf = surfaces["helicoid"]
    prof = lc.coefficient_profile(surf.chart)
    win = (0.0, 1.0)
    deg = classify_degrees(prof, win)
    assert deg.deg_num <= 1
    assert deg.deg_det == 2
    rep = h2_integrability(prof, win)
    assert rep.verdict == "convergent"
