"""Variational certificates: weights, ramps, windows, and the search.

Closed forms used here:
  transverse weights: for g = cos(pi u / 2a) on (-a, a),
    int g^2 = a,
    int u^2 g^2 = a^3 (1/3 - 2/pi^2),
    int u^4 g^2 = a^5 (1/5 - 4/pi^2 + 24/pi^4),
    int u^2 [(g + u g')^2 - (pi/2a)^2 (u g)^2] = a^3 (4/3 - 8/pi^2).
  flat annulus capacity: optimal ramp energy 2*pi/log(rb/ra).
  cross coefficient on a constant-ratio tail: mean * sqrt(det) = c gives
    q1 = -a/2 * c * (s extent) * (t0 - 2*alpha),
    with c = -1/radius on the cylinder and c = -cot(alpha)/ell0 on the
    cone tail (ell0 = cap_radius * cot(half_angle)).
"""

import dataclasses

import numpy as np
import pytest
from scipy.integrate import quad

import layercert as lc
from layercert.certify import (
    capacity_function,
    cutoff_j,
    direct_form_value,
    ground_mode,
    plateau_psi,
    quadratic_form,
    transverse_weights,
    verify_certificate,
)
from layercert.errors import SupportViolation


def test_transverse_weights_match_quadrature():
    for a in (0.2, 0.5, 1.3):
        k1 = np.pi / (2.0 * a)
        g = lambda u: np.cos(k1 * u)
        dg = lambda u: -k1 * np.sin(k1 * u)
        wts = transverse_weights(a)
        mass = quad(lambda u: g(u) ** 2, -a, a)[0]
        u2 = quad(lambda u: u * u * g(u) ** 2, -a, a)[0]
        u4 = quad(lambda u: u ** 4 * g(u) ** 2, -a, a)[0]
        gap = quad(lambda u: u * u * ((g(u) + u * dg(u)) ** 2
                                      - k1 * k1 * (u * g(u)) ** 2), -a, a)[0]
        assert abs(wts["mass"] - mass) <= 1e-12 * a
        assert abs(wts["mass_u2"] - u2) <= 1e-12 * a ** 3
        assert abs(wts["mass_u4"] - u4) <= 1e-12 * a ** 5
        assert abs(wts["excited_gap_k"] - gap) <= 1e-11 * a ** 3


def test_ground_mode_vanishes_at_walls():
    a = 0.37
    assert ground_mode(np.array([-a, a]), a) == pytest.approx([0.0, 0.0], abs=1e-15)
    assert ground_mode(0.0, a) == 1.0


def test_capacity_flat_annulus_closed_form(surfaces):
    for rb in (10.0, 100.0, 1000.0):
        ramp = capacity_function(surfaces["plane"], 1.0, rb)
        exact = 2.0 * np.pi / np.log(rb)
        assert abs(ramp.energy - exact) <= 1e-3 * exact, rb
        assert ramp.energy_err < 1e-3 * exact


def test_capacity_energy_monotone_to_zero(surfaces):
    for name in ("plane", "cylinder", "capped_cone", "hyperboloid"):
        surf = surfaces[name]
        ra = max(2.0, 2.0 * surf.r_core)
        cap = surf.radial.r_max_valid
        rbs = [ra * 4.0 ** k for k in range(1, 6) if ra * 4.0 ** k <= cap]
        assert len(rbs) >= 3, name
        energies = [capacity_function(surf, ra, rb).energy for rb in rbs]
        assert all(b < a for a, b in zip(energies, energies[1:])), name
        assert energies[-1] < 0.5 * energies[0], name


def test_capacity_ramp_is_a_ramp(surfaces):
    ramp = capacity_function(surfaces["capped_cone"], 1.0, 50.0)
    r = np.linspace(0.5, 60.0, 400)
    vals = ramp.value(r)
    assert np.all(vals[r <= 1.0] == 0.0)
    assert np.all(vals[r >= 50.0] == 1.0)
    assert np.all(np.diff(vals) >= -1e-12)


def test_plateau_profile_shape(surfaces):
    surf = surfaces["capped_cone"]
    plat = plateau_psi(surf, 1.0, 4.0, 40.0, 160.0)
    assert plat.value(0.5) == 0.0
    assert plat.value(200.0) == 0.0
    assert plat.value(10.0) == 1.0
    mid = plat.value(2.0)
    assert 0.0 < mid < 1.0
    assert plat.energy == pytest.approx(plat.up.energy + plat.down.energy)


def test_plateau_rejects_bad_radii(surfaces):
    surf = surfaces["capped_cone"]
    with pytest.raises(ValueError):
        plateau_psi(surf, 4.0, 1.0, 40.0, 160.0)  # out of order
    with pytest.raises(ValueError):
        plateau_psi(surf, 0.1, 4.0, 40.0, 160.0)  # r1 inside the core


def test_cutoff_support_policing(surfaces):
    cone = surfaces["capped_cone"]
    mk = lambda **kw: lc.TestFunctionParams(
        r1=1.0, r2=4.0, r3=400.0, r4=1600.0, eps_w=0.8, v0=8.0, t0=80.0,
        alpha=2.0, **kw)
    # plane chart is not periodic: no full-circle window
    with pytest.raises(SupportViolation):
        cutoff_j(surfaces["plane"].chart, mk(full_circle=True))
    # window past the chart's v-range
    bad_v = lc.TestFunctionParams(r1=1.0, r2=4.0, r3=400.0, r4=1600.0,
                                  eps_w=0.8, v0=-2.0, t0=1.0, alpha=0.2)
    with pytest.raises(SupportViolation):
        cutoff_j(cone.chart, bad_v, surface=cone)
    # window radii escape the plateau annulus
    tight = lc.TestFunctionParams(r1=1.0, r2=4.0, r3=6.0, r4=24.0,
                                  eps_w=0.8, v0=8.0, t0=80.0, alpha=2.0,
                                  full_circle=True)
    with pytest.raises(SupportViolation):
        cutoff_j(cone.chart, tight, surface=cone)


def test_params_validation():
    with pytest.raises(ValueError):
        lc.TestFunctionParams(r1=1.0, r2=2.0, r3=3.0, r4=4.0,
                              eps_w=1.0, v0=1.0, t0=1.0, alpha=0.5)  # 4a >= t0
    with pytest.raises(ValueError):
        lc.TestFunctionParams(r1=2.0, r2=1.0, r3=3.0, r4=4.0,
                              eps_w=1.0, v0=1.0, t0=8.0, alpha=0.5)


def _rebuild(layer, cert):
    p = cert.params
    plat = plateau_psi(layer.surface, p.r1, p.r2, p.r3, p.r4)
    cut = cutoff_j(layer.surface.chart, p, surface=layer.surface)
    return plat, cut


def test_cross_term_closed_form_cylinder(cylinder_layer, cylinder_cert):
    p = cylinder_cert.params
    plat, cut = _rebuild(cylinder_layer, cylinder_cert)
    dec = quadratic_form(cylinder_layer, plat, cut, components=["cross"])
    chart = cylinder_layer.surface.chart
    L_s = chart.s_range[1] - chart.s_range[0]
    oracle = 0.5 * cylinder_layer.a * L_s * (p.t0 - 2.0 * p.alpha)
    assert abs(dec.q1 - oracle) <= 1e-12 * abs(oracle)


def test_cross_term_closed_form_cone(cone_layer, cone_cert):
    p = cone_cert.params
    plat, cut = _rebuild(cone_layer, cone_cert)
    dec = quadratic_form(cone_layer, plat, cut, components=["cross"])
    chart = cone_layer.surface.chart
    L_s = chart.s_range[1] - chart.s_range[0]
    ell0 = 0.4  # cap_radius * cot(pi/4)
    oracle = 0.5 * cone_layer.a / ell0 * L_s * (p.t0 - 2.0 * p.alpha)
    assert abs(dec.q1 - oracle) <= 1e-12 * abs(oracle)
    m1_oracle = transverse_weights(cone_layer.a)["mass_u2"] / (
        0.5 * cone_layer.a) * oracle
    assert abs(dec.m1 - m1_oracle) <= 1e-12 * abs(m1_oracle)


def test_form_is_quadratic_in_the_mix(cylinder_layer, cylinder_cert):
    # 20 random mixing weights: the direct layer integral must match the
    # decomposed parabola within the two quadrature error budgets
    dec = cylinder_cert.decomposition
    plat, cut = _rebuild(cylinder_layer, cylinder_cert)
    rng = np.random.default_rng(42)
    for mix in rng.uniform(-1.2, 1.2, 20):
        direct = direct_form_value(cylinder_layer, plat, cut, mix=float(mix),
                                   refine=1)
        predicted = dec.value(float(mix))
        tol = (dec.error_value(float(mix)) + direct.error
               + 5e-9 * max(1.0, abs(predicted)))
        assert abs(direct.value - predicted) <= tol, mix


def test_eps_star_is_the_minimum(cylinder_cert):
    dec = cylinder_cert.decomposition
    assert dec.q2 > 0.0
    star = dec.eps_star
    base = dec.value(star)
    for d in (1e-3, 0.1, 1.0):
        assert dec.value(star + d) > base
        assert dec.value(star - d) > base


def test_certified_with_margin(cylinder_layer, cylinder_cert,
                               cone_layer, cone_cert):
    for layer, cert in ((cylinder_layer, cylinder_cert),
                        (cone_layer, cone_cert)):
        assert cert.verdict == "certified"
        dec = cert.decomposition
        assert dec.value_at_star < 0.0
        assert abs(dec.value_at_star) > 5.0 * dec.error_at_star
        assert cert.margin < 0.0
        assert cert.rayleigh_quotient < cert.threshold
        assert cert.params.epsilon == pytest.approx(dec.eps_star, rel=1e-12)


def test_verify_reproduces_certificates(cylinder_layer, cylinder_cert,
                                        cone_layer, cone_cert):
    for layer, cert in ((cylinder_layer, cylinder_cert),
                        (cone_layer, cone_cert)):
        out = verify_certificate(layer, cert)
        assert out["ok"]
        assert out["consistent"]
        assert out["still_certified"]
        assert abs(out["value_new"] - out["value_old"]) <= out["bound"]


def test_verify_flags_tampering(cylinder_layer, cylinder_cert):
    dec = cylinder_cert.decomposition
    forged = dataclasses.replace(cylinder_cert,
                                 decomposition=dataclasses.replace(
                                     dec, q0=dec.q0 + 1e-3))
    out = verify_certificate(cylinder_layer, forged)
    assert not out["consistent"]
    assert not out["ok"]


def test_plane_has_no_cross_coupling(plane_layer, plane_cert):
    assert plane_cert.verdict == "not_found"
    dec = plane_cert.decomposition
    scale = max(abs(dec.q0), abs(dec.q2))
    assert abs(dec.q1) <= 1e-12 * scale
    assert dec.discriminant <= 1e-12 * scale * scale
    assert dec.q0 >= 0.0
    assert plane_cert.rayleigh_quotient >= plane_cert.threshold
