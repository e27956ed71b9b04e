"""Total curvature, end constants, and the classical identities.

Closed forms used here:
  plane: total K = 0, one end with lambda = 1.
  capped cone, half angle alpha: all curvature sits in the cap, so
    total K = 2*pi*(1 - sin(alpha)) exactly, and the single end has
    lambda = sin(alpha).
  hyperboloid (unit waist): chi = 0, two ends with lambda = 1/sqrt(2),
    so the end-defect identity forces total K = -2*sqrt(2)*pi.
  cylinder: total K = 0, two ends of zero area growth (lambda = 0).
"""

import numpy as np
import pytest

import layercert as lc
from layercert.quadrature import radial_integral
from layercert.topology import (
    a2_truncations,
    hartman_residual,
    isoperimetric_constants,
    topology_report,
    total_curvature,
    white_check,
)

SQ2 = np.sqrt(2.0)


def test_plane_everything_exact(surfaces):
    rep = topology_report(surfaces["plane"])
    assert abs(rep.total_k) <= 1e-12
    assert rep.lambdas == pytest.approx((1.0,), abs=1e-9)
    assert abs(rep.hartman_residual) <= 1e-9
    assert rep.a2_verdict == "convergent"
    assert rep.white_residual == pytest.approx(0.0, abs=1e-12)


def test_cone_total_curvature_closed_form(surfaces):
    total, tail, _ = total_curvature(surfaces["capped_cone"])
    exact = 2.0 * np.pi * (1.0 - np.sin(np.pi / 4.0))
    assert abs(total - exact) <= 1e-9
    assert 0.0 < total <= 2.0 * np.pi


def test_cone_end_constant(surfaces):
    lams = isoperimetric_constants(surfaces["capped_cone"])
    assert len(lams) == 1
    assert abs(lams[0] - np.sin(np.pi / 4.0)) <= 1e-4


def test_cone_hartman_closed_both_sides(surfaces):
    res, tail = hartman_residual(surfaces["capped_cone"])
    assert abs(res) < 0.02


def test_cone_area_ratio_ladder_is_first_order(surfaces):
    # A(R)/(pi R^2) - lambda must shrink like 1/R: doubling R halves it
    prof = surfaces["capped_cone"].radial
    lam = np.sin(np.pi / 4.0)
    errs = []
    for R in (4.0, 8.0, 16.0, 32.0, 64.0):
        area = radial_integral(lambda r: np.asarray(prof.circumference(r)),
                               0.0, R, breaks=prof.breaks).value
        errs.append(abs(area / (np.pi * R * R) - lam))
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    for rho in ratios:
        assert 1.6 <= rho <= 2.4, ratios


def test_hyperboloid_report(surfaces):
    rep = topology_report(surfaces["hyperboloid"])
    assert rep.euler_characteristic == 0
    assert len(rep.lambdas) == 2
    for lam in rep.lambdas:
        assert abs(lam - 1.0 / SQ2) <= 5e-3
    exact = -2.0 * SQ2 * np.pi
    assert abs(rep.total_k - exact) <= max(2.0 * rep.total_k_tail, 0.03)
    assert abs(rep.hartman_residual) < 0.02
    assert rep.huber_slack >= -1e-9


def test_huber_slack_nonnegative_everywhere(surfaces):
    for name, surf in surfaces.items():
        if surf.radial is None:
            continue
        rep = topology_report(surf)
        assert rep.huber_slack >= -2.0 * np.pi * 0.01, name


def test_cylinder_ends_carry_no_area_growth(surfaces):
    rep = topology_report(surfaces["cylinder"])
    assert abs(rep.total_k) <= 1e-12
    assert rep.lambdas == pytest.approx((0.0, 0.0), abs=1e-9)
    assert rep.a2_verdict == "divergent"


def test_bending_divergence_rates(surfaces):
    # cone and hyperboloid shed bending energy like 1/r^2 against a
    # linearly growing circumference: logarithmic truncation growth.
    # the cylinder never sheds any: linear growth.
    assert white_check(surfaces["capped_cone"]).rate == "log"
    assert white_check(surfaces["hyperboloid"]).rate == "log"
    assert white_check(surfaces["cylinder"]).rate == "polynomial"


def test_helicoid_bending_diverges_by_exhaustion(surfaces):
    rep = white_check(surfaces["helicoid"])
    assert rep.verdict == "divergent"
    assert rep.white_residual is None


def test_helicoid_has_no_end_constants(surfaces):
    with pytest.raises(ValueError):
        isoperimetric_constants(surfaces["helicoid"])
    # the full report dies even earlier: its total curvature never settles
    with pytest.raises(lc.errors.NonconvergentTail):
        topology_report(surfaces["helicoid"])


def test_a2_truncations_monotone(surfaces):
    grid, values = a2_truncations(surfaces["capped_cone"])
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
