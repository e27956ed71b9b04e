"""Chart geometry oracles.

Closed-form curvature references:
  plane:     K = 0, H = 0
  cylinder:  K = 0, H = -1/radius (normal chosen toward the axis)
  helicoid:  K = -b^2/(b^2+v^2)^2, H = 0 (minimal), b the pitch parameter
  cone tail: K = 0, H = -cot(alpha)/(l0+v), l0 = cap_radius*cot(alpha)
  tangent developable of a helix: K = 0 and, along each ruling,
      d(1/H)/dv = -(curvature/torsion) = -(radius/pitch) of the helix
  hyperboloid (a=c=1): with w = 1+2z^2 at embedding height z,
      K = -1/w^2, H = -(w-1)/w^{3/2}

The second route to H and K used as a cross-check on every chart is the
classical first/second fundamental form algebra on the embedding
x(s,v) = directrix(s) + v*ruling(s), assembled from the chart curves'
exact derivative evaluators (no finite differences).
"""

import numpy as np
import pytest

import layercert as lc
from layercert.charts import metric_terms
from layercert.errors import DegenerateChart
from layercert.curves import Curve

from conftest import chart_samples

N_PTS = 1000


def _vector_route(chart, s, v):
    """K and H from the embedding fundamental forms; normal = x_s x x_v."""
    b1 = chart.directrix.deriv(s)
    b2 = chart.directrix.second(s)
    e = chart.ruling(s)
    e1 = chart.ruling.deriv(s)
    e2 = chart.ruling.second(s)
    xs = b1 + v[:, None] * e1
    xv = e
    xss = b2 + v[:, None] * e2
    xsv = e1
    n = np.cross(xs, xv)
    n /= np.linalg.norm(n, axis=-1)[:, None]
    n *= chart.orientation
    E = np.einsum("ij,ij->i", xs, xs)
    F = np.einsum("ij,ij->i", xs, xv)
    G = np.einsum("ij,ij->i", xv, xv)
    L = np.einsum("ij,ij->i", xss, n)
    M = np.einsum("ij,ij->i", xsv, n)
    det = E * G - F * F
    gauss = -M * M / det  # N = <x_vv, n> = 0 on ruled charts
    mean = (G * L - 2.0 * F * M) / det
    return gauss, mean


def test_gauge_residuals_catalog(surfaces):
    for name, surf in surfaces.items():
        res = lc.assert_in_gauge(surf.chart)
        assert max(res.values()) <= 1e-8, name


def test_out_of_gauge_rejected():
    line = lc.CATALOG["plane"]().chart.directrix
    fat = Curve(lambda s: np.stack([0 * s, 0 * s + 2.0, 0 * s], axis=-1),
                lambda s: np.zeros(np.shape(s) + (3,)),
                lambda s: np.zeros(np.shape(s) + (3,)), label="fat-ruling")
    chart = lc.RuledChart(line, fat, (-1.0, 1.0), (-1.0, 1.0))
    with pytest.raises(DegenerateChart):
        lc.assert_in_gauge(chart)


def test_plane_flat(surfaces):
    rng = np.random.default_rng(3)
    s, v = chart_samples(surfaces["plane"].chart, N_PTS, rng)
    t = metric_terms(surfaces["plane"].chart, s, v)
    assert np.max(np.abs(t["gauss"])) <= 1e-12
    assert np.max(np.abs(t["mean"])) <= 1e-12
    assert np.max(np.abs(t["det"] - 1.0)) <= 1e-12


def test_cylinder_closed_form(surfaces):
    rng = np.random.default_rng(4)
    surf = lc.make_surface("cylinder", radius=2.0)
    s, v = chart_samples(surf.chart, N_PTS, rng)
    t = metric_terms(surf.chart, s, v)
    assert np.max(np.abs(t["gauss"])) <= 1e-10
    assert np.max(np.abs(t["mean"] + 0.5)) <= 1e-6 * 0.5
    assert np.max(np.abs(t["det"] - 1.0)) <= 1e-10


def test_helicoid_closed_form(surfaces):
    rng = np.random.default_rng(5)
    chart = surfaces["helicoid"].chart
    s, v = chart_samples(chart, N_PTS, rng, v_cap=8.0)
    t = metric_terms(chart, s, v)
    k_exact = -1.0 / (1.0 + v * v) ** 2
    assert np.max(np.abs(t["gauss"] - k_exact) / np.abs(k_exact)) <= 1e-6
    assert np.max(np.abs(t["mean"])) <= 1e-6
    assert np.max(np.abs(t["det"] - (1.0 + v * v))) <= 1e-6


def test_cone_tail_closed_form(surfaces):
    rng = np.random.default_rng(6)
    surf = surfaces["capped_cone"]
    alpha = surf.params["half_angle"]
    l0 = surf.params["cap_radius"] / np.tan(alpha)
    chart = surf.chart
    s, v = chart_samples(chart, N_PTS, rng, v_cap=50.0)
    t = metric_terms(chart, s, v)
    h_exact = -np.cos(alpha) / np.sin(alpha) / (l0 + v)
    assert np.max(np.abs(t["gauss"])) <= 1e-10
    assert np.max(np.abs(t["mean"] - h_exact) / np.abs(h_exact)) <= 1e-6


def test_tangent_developable_closed_form(surfaces):
    surf = surfaces["tangent_developable"]
    chart = surf.chart
    radius = surf.params["helix_radius"]
    pitch = surf.params["helix_pitch"]
    s_lo, s_hi = chart.s_range
    s0 = s_lo + 0.6 * (s_hi - s_lo)
    v = np.linspace(1.0, 9.0, 200)
    t = metric_terms(chart, np.full_like(v, s0), v)
    assert np.max(np.abs(t["gauss"])) <= 1e-10
    # 1/H is affine in v with slope -(kappa/tau) = -(radius/pitch)
    inv_h = 1.0 / t["mean"]
    coef = np.polyfit(v, inv_h, 1)
    fit = np.polyval(coef, v)
    assert np.max(np.abs(fit - inv_h)) <= 1e-6 * np.max(np.abs(inv_h))
    assert abs(abs(coef[0]) - radius / pitch) <= 1e-6 * (radius / pitch)


def test_hyperboloid_closed_form(surfaces):
    rng = np.random.default_rng(7)
    chart = surfaces["hyperboloid"].chart
    s, v = chart_samples(chart, N_PTS, rng, v_cap=12.0)
    t = metric_terms(chart, s, v)
    z = (chart.directrix(s) + v[:, None] * chart.ruling(s))[:, 2]
    w = 1.0 + 2.0 * z * z
    k_exact = -1.0 / (w * w)
    h_exact = -(w - 1.0) / w ** 1.5
    assert np.max(np.abs(t["gauss"] - k_exact) / np.abs(k_exact)) <= 1e-6
    # H vanishes on the waist; compare against the K scale there
    scale = np.maximum(np.abs(h_exact), np.sqrt(np.abs(k_exact)))
    assert np.max(np.abs(t["mean"] - h_exact) / scale) <= 1e-6


def test_vector_route_cross_check(surfaces):
    rng = np.random.default_rng(8)
    for name, surf in surfaces.items():
        chart = surf.chart
        s, v = chart_samples(chart, 400, rng, v_cap=20.0)
        t = metric_terms(chart, s, v)
        gauss_vec, mean_vec = _vector_route(chart, s, v)
        scale_k = np.maximum(1.0, np.abs(gauss_vec))
        scale_h = np.maximum(1.0, np.abs(mean_vec))
        assert np.max(np.abs(t["gauss"] - gauss_vec) / scale_k) <= 1e-6, name
        assert np.max(np.abs(t["mean"] - mean_vec) / scale_h) <= 1e-6, name


def test_mean_curvature_two_routes(surfaces):
    # num/det^{3/2} must equal (num/sqrt(det))/det at every sample
    rng = np.random.default_rng(9)
    for name, surf in surfaces.items():
        s, v = chart_samples(surf.chart, N_PTS, rng, v_cap=25.0)
        t = metric_terms(surf.chart, s, v)
        other = t["l"] / t["det"]
        scale = np.maximum(1.0, np.abs(t["mean"]))
        assert np.max(np.abs(t["mean"] - other) / scale) <= 1e-6, name


def test_ruled_gauss_nonpositive(surfaces):
    rng = np.random.default_rng(10)
    for name, surf in surfaces.items():
        s, v = chart_samples(surf.chart, N_PTS, rng, v_cap=40.0)
        t = metric_terms(surf.chart, s, v)
        assert np.max(t["gauss"]) <= 1e-10, name


def test_developability_verdicts(surfaces):
    expected = {"plane": True, "cylinder": True, "capped_cone": True,
                "tangent_developable": True, "helicoid": False,
                "hyperboloid": False}
    for name, flat in expected.items():
        rep = lc.is_developable(surfaces[name].chart)
        assert rep.developable == flat, name


def test_orientation_flips_mean_keeps_gauss(surfaces):
    chart = surfaces["capped_cone"].chart
    flipped = lc.RuledChart(chart.directrix, chart.ruling, chart.s_range,
                            chart.v_range, periodic=chart.periodic,
                            orientation=-chart.orientation, label="flip")
    s = np.array([0.5, 1.0])
    v = np.array([1.0, 3.0])
    t0 = metric_terms(chart, s, v)
    t1 = metric_terms(flipped, s, v)
    assert np.allclose(t0["mean"], -t1["mean"], rtol=0, atol=1e-14)
    assert np.allclose(t0["gauss"], t1["gauss"], rtol=0, atol=1e-14)


def test_coefficient_profile_from_constants():
    prof = lc.CoefficientProfile.from_constants(
        n0=0.3, n1=-0.2, n2=0.05, d1=1.1, d2=0.8)
    s = np.linspace(-1.0, 1.0, 7)
    v = 2.5
    det = prof.first_form_det(s, np.full_like(s, v))
    num = prof.shape_numerator(s, np.full_like(s, v))
    assert np.allclose(det, 1.0 + 1.1 * v + 0.8 * v * v)
    assert np.allclose(num, 0.3 - 0.2 * v + 0.05 * v * v)
    assert np.allclose(prof.ratio(s, np.full_like(s, v)), num / det)


def test_coefficient_profile_matches_chart(surfaces):
    chart = surfaces["capped_cone"].chart
    prof = lc.coefficient_profile(chart)
    s = np.linspace(chart.s_range[0] + 0.01, chart.s_range[1] - 0.01, 9)
    v = np.full_like(s, 2.0)
    t = metric_terms(chart, s, v)
    assert np.allclose(prof.first_form_det(s, v), t["det"], rtol=1e-9)
    scale = np.maximum(1e-3, np.abs(t["l"]))
    assert np.max(np.abs(prof.shape_numerator(s, v) / np.sqrt(t["det"])
                         - t["l"]) / scale) <= 1e-8
