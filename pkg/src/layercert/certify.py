"""Variational binding certificates for thin layers over ruled-tail surfaces.

The transverse ground mode of a straight slab of half-width a sits exactly at
the essential-spectrum floor (pi/2a)^2. Mixing the first excited transverse
mode against a cutoff window on the curved tail gives a trial function whose
shifted energy is an exact quadratic in the mixing weight,

    value(mix) = q0 + 2*mix*q1 + mix^2*q2.

All transverse (u) integrals are evaluated in closed form, so the only
numerical integrals are manifestly positive gradient terms and mildly
curvature-weighted window terms. Nothing threshold-sized is ever subtracted
numerically; the quadrature error bounds therefore survive into the final
margin. Binding is certified when the minimum of the quadratic is negative
by more than the accumulated quadrature error.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .asymptotics import DEG_TOL, classify_degrees, dominance_scale
from .charts import RuledChart, coefficient_profile, metric_terms
from .errors import (NotParabolicNumerically, SearchExhausted,
                     SupportViolation, UnstableWindow)
from .quadrature import Axis, QuadResult, integrate, integrate_fixed, radial_integral
from .surfaces import (LayerModel, SurfaceModel, chart_layer_terms,
                       radial_layer_terms)

# Containment slack between the cutoff window and the plateau annulus, and
# between the annulus and the core.
SUPPORT_PAD = 1.05


def ground_mode(u, a: float):
    """Transverse ground mode cos(pi u / 2a), vanishing at u = +-a."""
    return np.cos(np.pi * np.asarray(u, dtype=float) / (2.0 * a))


def ground_slope(u, a: float):
    k1 = np.pi / (2.0 * a)
    return -k1 * np.sin(k1 * np.asarray(u, dtype=float))


def transverse_weights(a: float) -> dict:
    """Closed-form u-integrals of the two transverse modes on (-a, a).

    With g = ground mode and e = u*g the excited companion:
      mass          = int g^2
      mass_u2       = int u^2 g^2
      mass_u4       = int u^4 g^2
      excited_gap_k = int u^2 [e'^2 - (pi/2a)^2 e^2] combination weight;
                      multiplies the Gauss-curvature window term of q2.
    """
    pi2 = np.pi ** 2
    return {
        "mass": a,
        "mass_u2": a ** 3 * (1.0 / 3.0 - 2.0 / pi2),
        "mass_u4": a ** 5 * (0.2 - 4.0 / pi2 + 24.0 / pi2 ** 2),
        "excited_gap_k": a ** 3 * (4.0 / 3.0 - 8.0 / pi2),
    }


def smoothstep(x):
    """C^1 ramp 3x^2-2x^3 clamped to [0, 1]."""
    xx = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return xx * xx * (3.0 - 2.0 * xx)


def smoothstep_slope(x):
    x = np.asarray(x, dtype=float)
    inside = (x > 0.0) & (x < 1.0)
    xx = np.clip(x, 0.0, 1.0)
    return np.where(inside, 6.0 * xx * (1.0 - xx), 0.0)


# ---------------------------------------------------------------------------
# Radial capacity ramps and the plateau profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CapacityRamp:
    """Harmonic radial ramp 0 -> 1 on [ra, rb] with its Dirichlet energy.

    The minimizer of int sigma(r) f'(r)^2 dr among ramps is f = T(r)/T(rb)
    with T the antiderivative of 1/sigma; its energy is 1/T(rb). energy_err
    is the gap between two tabulation resolutions.
    """

    ra: float
    rb: float
    energy: float
    energy_err: float
    _t_of_r: Callable
    _t_end: float
    _sigma: Callable

    def value(self, r):
        r = np.asarray(r, dtype=float)
        raw = np.clip(self._t_of_r(np.clip(r, self.ra, self.rb)) / self._t_end,
                      0.0, 1.0)
        return np.where(r <= self.ra, 0.0, np.where(r >= self.rb, 1.0, raw))

    def slope(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r > self.ra) & (r < self.rb)
        sig = np.asarray(self._sigma(np.where(inside, r, self.rb)), dtype=float)
        return np.where(inside, 1.0 / (sig * self._t_end), 0.0)


def _ramp_table(sigma: Callable, ra: float, rb: float, breaks: Sequence[float],
                n: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative T(r) = int_ra^r ds/sigma on a graded grid honoring breaks."""
    pts = np.unique(np.concatenate(
        [[ra], [b for b in breaks if ra < b < rb], [rb]]))
    r_all = [np.array([ra])]
    t_all = [np.array([0.0])]
    offset = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi > 50.0 * max(lo, 1e-300) and lo > 0:
            grid = np.geomspace(lo, hi, n)
        else:
            grid = np.linspace(lo, hi, n)
        spl = CubicSpline(grid, 1.0 / np.asarray(sigma(grid), dtype=float))
        seg = spl.antiderivative()(grid) - spl.antiderivative()(lo) + offset
        offset = seg[-1]
        r_all.append(grid[1:])
        t_all.append(seg[1:])
    return np.concatenate(r_all), np.concatenate(t_all)


def capacity_function(surface: SurfaceModel, ra: float, rb: float,
                      n: int = 2049) -> CapacityRamp:
    """Optimal radial ramp between the circles r = ra and r = rb.

    On a plane annulus the energy is 2*pi/log(rb/ra); it must decay to zero
    as rb grows for the outer plateau ramp to cost nothing.
    """
    if surface.radial is None:
        raise ValueError(f"surface {surface.label!r} has no radial structure")
    if not 0.0 < ra < rb:
        raise ValueError("need 0 < ra < rb")
    if rb > surface.radial.r_max_valid:
        raise ValueError("rb beyond the tabulated radial profile")
    sigma = surface.radial.sigma_total
    r_f, t_f = _ramp_table(sigma, ra, rb, surface.radial.breaks, n)
    r_c, t_c = _ramp_table(sigma, ra, rb, surface.radial.breaks, n // 2 + 1)
    e_fine = 1.0 / t_f[-1]
    e_coarse = 1.0 / t_c[-1]
    return CapacityRamp(
        ra=float(ra), rb=float(rb), energy=float(e_fine),
        energy_err=float(abs(e_fine - e_coarse)),
        _t_of_r=PchipInterpolator(r_f, t_f), _t_end=float(t_f[-1]),
        _sigma=sigma)


def outer_radius_for_energy(surface: SurfaceModel, ra: float, target: float,
                            r_limit: float = 1e12) -> tuple[float, CapacityRamp]:
    """Double the outer radius until the ramp energy drops below target.

    Raises NotParabolicNumerically when the energy stagnates or the radius
    budget is exhausted: the surface then cannot feed an arbitrarily cheap
    outer cutoff, and the whole plateau construction is off the table.
    """
    cap = min(r_limit, surface.radial.r_max_valid if surface.radial else r_limit)
    rb = max(4.0 * ra, ra + 1.0)
    prev = None
    while rb <= cap:
        ramp = capacity_function(surface, ra, rb)
        if ramp.energy <= target:
            return rb, ramp
        if prev is not None and prev - ramp.energy < 1e-9 * prev:
            raise NotParabolicNumerically(
                f"ramp energy stagnates at {ramp.energy:.6g} (target {target:.6g}) "
                f"on {surface.label!r}")
        prev = ramp.energy
        rb *= 2.0
    raise NotParabolicNumerically(
        f"no outer radius within {cap:.3g} brings the ramp energy below "
        f"{target:.6g} on {surface.label!r}")


@dataclass(frozen=True)
class PlateauProfile:
    """Radial profile: 0 outside (r1, r4), harmonic ramps, 1 on [r2, r3]."""

    r1: float
    r2: float
    r3: float
    r4: float
    up: CapacityRamp
    down: CapacityRamp

    @property
    def energy(self) -> float:
        # ramps have disjoint supports, so the Dirichlet energies just add
        return self.up.energy + self.down.energy

    @property
    def energy_err(self) -> float:
        return self.up.energy_err + self.down.energy_err

    def value(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        mid = (r >= self.r2) & (r <= self.r3)
        out = np.where(mid, 1.0, out)
        lo = (r > self.r1) & (r < self.r2)
        out = np.where(lo, self.up.value(r), out)
        hi = (r > self.r3) & (r < self.r4)
        out = np.where(hi, 1.0 - self.down.value(r), out)
        return out

    def slope(self, r):
        return self.up.slope(r) - self.down.slope(r)


def plateau_psi(surface: SurfaceModel, r1: float, r2: float, r3: float,
                r4: float, n: int = 2049) -> PlateauProfile:
    """Build the radial plateau with capacity-optimal ramps on both sides."""
    if not (0.0 < r1 < r2 < r3 < r4):
        raise ValueError("radii must satisfy 0 < r1 < r2 < r3 < r4")
    if r1 <= surface.r_core:
        raise ValueError(
            f"inner radius {r1:g} must lie outside the core r = {surface.r_core:g}")
    up = capacity_function(surface, r1, r2, n=n)
    down = capacity_function(surface, r3, r4, n=n)
    return PlateauProfile(r1=float(r1), r2=float(r2), r3=float(r3),
                          r4=float(r4), up=up, down=down)


# ---------------------------------------------------------------------------
# The cutoff window on the ruled chart
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunctionParams:
    """Geometry of one trial function: plateau radii + cutoff window."""

    r1: float
    r2: float
    r3: float
    r4: float
    eps_w: float  # half-width of the window in s
    v0: float  # window start along the rulings
    t0: float  # window extent along the rulings
    alpha: float  # half of the ramp width (ramps are 2*alpha wide)
    s_center: float = 0.0
    full_circle: bool = False  # periodic chart, window wraps all the way round
    epsilon: float | None = None  # frozen mixing weight (filled by the search)

    def __post_init__(self):
        if not (0.0 < self.r1 < self.r2 < self.r3 < self.r4):
            raise ValueError("radii must satisfy 0 < r1 < r2 < r3 < r4")
        if self.eps_w <= 0 or self.t0 <= 0 or self.alpha <= 0:
            raise ValueError("eps_w, t0, alpha must be positive")
        if not 4.0 * self.alpha < self.t0:
            raise ValueError("need 4*alpha < t0 (both v-ramps must fit)")
        if not self.full_circle and not 2.0 * self.alpha < self.eps_w:
            raise ValueError("need 2*alpha < eps_w (s-ramps must fit)")


@dataclass(frozen=True)
class WindowCutoff:
    """C^1 window on the chart: plateau 1, smoothstep ramps of width 2*alpha.

    Slopes are bounded by 3/(4*alpha) <= 1/alpha. With full_circle=True the
    s-factor is identically 1 (the window wraps a periodic chart), so the
    cutoff has no s-gradient at all.
    """

    chart: RuledChart
    s_center: float
    eps_w: float
    v0: float
    t0: float
    alpha: float
    full_circle: bool

    def _offset(self, s):
        s = np.asarray(s, dtype=float)
        if self.chart.periodic:
            period = self.chart.s_range[1] - self.chart.s_range[0]
            return (s - self.s_center + 0.5 * period) % period - 0.5 * period
        return s - self.s_center

    def s_factor(self, s):
        if self.full_circle:
            return np.ones(np.shape(np.asarray(s, dtype=float)))
        d = np.abs(self._offset(s))
        return smoothstep((self.eps_w - d) / (2.0 * self.alpha))

    def s_slope(self, s):
        if self.full_circle:
            return np.zeros(np.shape(np.asarray(s, dtype=float)))
        off = self._offset(s)
        t = (self.eps_w - np.abs(off)) / (2.0 * self.alpha)
        return -np.sign(off) * smoothstep_slope(t) / (2.0 * self.alpha)

    def v_factor(self, v):
        v = np.asarray(v, dtype=float)
        rise = smoothstep((v - self.v0) / (2.0 * self.alpha))
        fall = smoothstep((self.v0 + self.t0 - v) / (2.0 * self.alpha))
        return rise * fall

    def v_slope(self, v):
        v = np.asarray(v, dtype=float)
        rise = smoothstep((v - self.v0) / (2.0 * self.alpha))
        fall = smoothstep((self.v0 + self.t0 - v) / (2.0 * self.alpha))
        d_rise = smoothstep_slope((v - self.v0) / (2.0 * self.alpha)) / (2.0 * self.alpha)
        d_fall = -smoothstep_slope((self.v0 + self.t0 - v) / (2.0 * self.alpha)) / (2.0 * self.alpha)
        return d_rise * fall + rise * d_fall

    def value(self, s, v):
        return self.s_factor(s) * self.v_factor(v)

    def grad(self, s, v):
        return (self.s_slope(s) * self.v_factor(v),
                self.s_factor(s) * self.v_slope(v))


def cutoff_j(chart: RuledChart, params: TestFunctionParams,
             surface: SurfaceModel | None = None,
             n_check: int = 65) -> WindowCutoff:
    """Build the window cutoff and police its support.

    The support must sit inside the chart's v-range, and (when the surface
    carries radii) inside the plateau annulus (r2, r3), else SupportViolation.
    """
    if params.full_circle and not chart.periodic:
        raise SupportViolation("full_circle window requires a periodic chart")
    v_lo, v_hi = chart.v_range
    if params.v0 <= v_lo or params.v0 + params.t0 >= v_hi:
        raise SupportViolation(
            f"window [{params.v0:g}, {params.v0 + params.t0:g}] leaves the "
            f"chart v-range ({v_lo:g}, {v_hi:g})")
    if not params.full_circle:
        half = 0.5 * (chart.s_range[1] - chart.s_range[0])
        if params.eps_w > half:
            raise SupportViolation("s-window wider than the chart")

    cut = WindowCutoff(chart=chart, s_center=params.s_center,
                       eps_w=params.eps_w, v0=params.v0, t0=params.t0,
                       alpha=params.alpha, full_circle=params.full_circle)

    if surface is not None and surface.radius_of_point is not None:
        if params.full_circle:
            s_grid = chart.s_samples(n_check)
        else:
            s_grid = np.linspace(params.s_center - params.eps_w,
                                 params.s_center + params.eps_w, n_check)
        radii = [surface.chart_radius(s_grid, np.full_like(s_grid, vv))
                 for vv in (params.v0, params.v0 + 0.5 * params.t0,
                            params.v0 + params.t0)]
        rmin = float(np.min(radii))
        rmax = float(np.max(radii))
        if rmin <= params.r2 or rmax >= params.r3:
            raise SupportViolation(
                f"window radii [{rmin:g}, {rmax:g}] escape the plateau "
                f"({params.r2:g}, {params.r3:g})")
    return cut


# ---------------------------------------------------------------------------
# The quadratic form decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticFormDecomposition:
    """Exact coefficients of value(mix) = q0 + 2 mix q1 + mix^2 q2.

    m0/m1/m2 are the matching mass (L^2) coefficients; err_* are quadrature
    error bounds, propagated linearly. pieces holds the raw integrals.
    """

    q0: float
    q1: float
    q2: float
    m0: float
    m1: float
    m2: float
    err_q0: float
    err_q1: float
    err_q2: float
    err_m0: float
    err_m1: float
    err_m2: float
    threshold: float
    pieces: dict

    def value(self, mix: float) -> float:
        return self.q0 + 2.0 * mix * self.q1 + mix * mix * self.q2

    def error_value(self, mix: float) -> float:
        return self.err_q0 + 2.0 * abs(mix) * self.err_q1 + mix * mix * self.err_q2

    def mass(self, mix: float) -> float:
        return self.m0 + 2.0 * mix * self.m1 + mix * mix * self.m2

    @property
    def eps_star(self) -> float:
        return -self.q1 / self.q2

    @property
    def value_at_star(self) -> float:
        return self.q0 - self.q1 * self.q1 / self.q2

    @property
    def error_at_star(self) -> float:
        return self.error_value(self.eps_star)

    @property
    def discriminant(self) -> float:
        return self.q1 * self.q1 - self.q0 * self.q2

    def rayleigh(self, mix: float) -> float:
        return self.threshold + self.value(mix) / self.mass(mix)


def _graded_axes(lo: float, hi: float, breaks=(), panels: int = 8,
                 order: int = 12) -> list[Axis]:
    """Split [lo, hi] at max(lo, 1) with log grading on long tails."""
    inner = tuple(b for b in breaks if lo < b < hi)
    split = max(lo, 1.0)
    if hi > 100.0 * split and split > lo:
        return [
            Axis(lo, split, panels=panels, order=order,
                 breaks=tuple(b for b in inner if b < split)),
            Axis(split, hi, panels=panels, order=order,
                 breaks=tuple(b for b in inner if b > split), log=True),
        ]
    if hi > 100.0 * split and lo > 0:
        return [Axis(lo, hi, panels=panels, order=order, breaks=inner, log=True)]
    return [Axis(lo, hi, panels=panels, order=order, breaks=inner)]


def _window_axes(cut: WindowCutoff, panels_s: int, panels_v: int,
                 order: int) -> tuple[Axis, Axis]:
    chart = cut.chart
    if cut.full_circle:
        s_ax = Axis(chart.s_range[0], chart.s_range[1], panels=panels_s,
                    order=order)
    else:
        lo = cut.s_center - cut.eps_w
        hi = cut.s_center + cut.eps_w
        s_ax = Axis(lo, hi, panels=panels_s, order=order,
                    breaks=(lo + 2.0 * cut.alpha, hi - 2.0 * cut.alpha))
    v_lo, v_hi = cut.v0, cut.v0 + cut.t0
    use_log = v_lo > 0 and v_hi > 100.0 * v_lo
    v_ax = Axis(v_lo, v_hi, panels=panels_v, order=order,
                breaks=(v_lo + 2.0 * cut.alpha, v_hi - 2.0 * cut.alpha),
                log=use_log)
    return s_ax, v_ax


def quadratic_form(layer: LayerModel, plateau: PlateauProfile,
                   cutoff: WindowCutoff, refine: int = 1,
                   components: Sequence[str] | None = None
                   ) -> QuadraticFormDecomposition:
    """Evaluate the decomposed quadratic form of the trial family.

    components selects which groups to compute ("plateau", "cross",
    "window"); unselected coefficients come back as nan. The plateau group
    feeds q0/m0, the cross group q1/m1, the window group q2/m2.
    """
    surface = layer.surface
    a = layer.a
    wts = transverse_weights(a)
    want = set(components) if components is not None else {"plateau", "cross",
                                                           "window"}
    unknown = want - {"plateau", "cross", "window"}
    if unknown:
        raise ValueError(f"unknown components {sorted(unknown)}")
    pieces: dict[str, float] = {}
    errs: dict[str, float] = {}
    nan = float("nan")
    q0 = q1 = q2 = m0 = m1 = m2 = nan
    e_q0 = e_q1 = e_q2 = e_m0 = e_m1 = e_m2 = nan

    if "plateau" in want:
        prof = surface.radial
        if prof is None:
            raise ValueError(
                f"surface {surface.label!r} has no radial structure")
        u_ax = Axis(-a, a, panels=4, order=12)

        def grad_f(r, u):
            t = radial_layer_terms(prof, r, u)
            g = ground_mode(u, a)
            sl = plateau.slope(r)
            return g * g * sl * sl * t["inv_rr"] * t["density"]

        g_val = g_err = 0.0
        for lo, hi in ((plateau.r1, plateau.r2), (plateau.r3, plateau.r4)):
            for ax in _graded_axes(lo, hi, breaks=prof.breaks):
                res = integrate(grad_f, [ax, u_ax], target_rel=1e-9,
                                max_refine=3, min_refine=refine)
                g_val += res.value
                g_err += res.error
        pieces["grad_plateau"] = g_val
        errs["grad_plateau"] = g_err

        def curv_f(r):
            val = plateau.value(r)
            return prof.gauss(r) * val * val * prof.sigma_total(r)

        def mass0_f(r):
            val = plateau.value(r)
            return ((a + wts["mass_u2"] * prof.gauss(r)) * val * val
                    * prof.sigma_total(r))

        inner_breaks = (plateau.r2, plateau.r3) + tuple(prof.breaks)
        res_k = radial_integral(curv_f, plateau.r1, plateau.r4,
                                breaks=inner_breaks, target_rel=1e-9)
        res_m = radial_integral(mass0_f, plateau.r1, plateau.r4,
                                breaks=inner_breaks, target_rel=1e-9)
        pieces["curv_plateau"] = a * res_k.value
        errs["curv_plateau"] = a * res_k.error
        q0 = g_val + a * res_k.value
        e_q0 = g_err + a * res_k.error
        m0 = res_m.value
        e_m0 = res_m.error

    chart = cutoff.chart
    if "cross" in want:
        s_ax, v_ax = _window_axes(cutoff, panels_s=8, panels_v=8, order=12)

        def cross_f(s, v):
            t = metric_terms(chart, s, v)
            return t["mean"] * t["sqrt_det"] * cutoff.value(s, v)

        res_c = integrate(cross_f, [s_ax, v_ax], target_rel=1e-10,
                          max_refine=3, min_refine=refine)
        pieces["cross"] = res_c.value
        errs["cross"] = res_c.error
        q1 = -0.5 * a * res_c.value
        e_q1 = 0.5 * a * res_c.error
        m1 = -wts["mass_u2"] * res_c.value
        e_m1 = wts["mass_u2"] * res_c.error

    if "window" in want:
        s_ax, v_ax = _window_axes(cutoff, panels_s=8, panels_v=8, order=12)

        def mass_f(s, v):
            t = metric_terms(chart, s, v)
            jj = cutoff.value(s, v)
            return jj * jj * t["sqrt_det"]

        def curvw_f(s, v):
            t = metric_terms(chart, s, v)
            jj = cutoff.value(s, v)
            return jj * jj * t["gauss"] * t["sqrt_det"]

        res_wm = integrate(mass_f, [s_ax, v_ax], target_rel=1e-10,
                           max_refine=3, min_refine=refine)
        res_wk = integrate(curvw_f, [s_ax, v_ax], target_rel=1e-10,
                           max_refine=3, min_refine=refine)
        pieces["window_mass"] = res_wm.value
        errs["window_mass"] = res_wm.error
        pieces["window_curv"] = res_wk.value
        errs["window_curv"] = res_wk.error

        s_ax3, v_ax3 = _window_axes(cutoff, panels_s=4, panels_v=4, order=10)
        u_ax3 = Axis(-a, a, panels=2, order=10)

        def gradw_f(s, v, u):
            lt = chart_layer_terms(chart, s, v, u)
            js, jv = cutoff.grad(s, v)
            g = ground_mode(u, a)
            quad = (lt["inv_ss"] * js * js + 2.0 * lt["inv_sv"] * js * jv
                    + lt["inv_vv"] * jv * jv)
            return (u * g) ** 2 * quad * lt["density"]

        res_gw = integrate_fixed(gradw_f, [s_ax3, v_ax3, u_ax3], refine=refine)
        pieces["grad_window"] = res_gw.value
        errs["grad_window"] = res_gw.error

        q2 = (res_gw.value + a * res_wm.value
              + wts["excited_gap_k"] * res_wk.value)
        e_q2 = (res_gw.error + a * res_wm.error
                + wts["excited_gap_k"] * abs(res_wk.error))
        m2 = wts["mass_u2"] * res_wm.value + wts["mass_u4"] * res_wk.value
        e_m2 = wts["mass_u2"] * res_wm.error + wts["mass_u4"] * abs(res_wk.error)
        if not q2 > 0:
            raise SupportViolation(
                f"window form coefficient q2 = {q2:.6g} is not positive; "
                "the layer thickness budget should prevent this")

    return QuadraticFormDecomposition(
        q0=q0, q1=q1, q2=q2, m0=m0, m1=m1, m2=m2,
        err_q0=e_q0, err_q1=e_q1, err_q2=e_q2,
        err_m0=e_m0, err_m1=e_m1, err_m2=e_m2,
        threshold=layer.threshold, pieces=pieces | {"errors": errs})


# ---------------------------------------------------------------------------
# Direct (undecomposed) evaluation, for cross-checking bilinearity
# ---------------------------------------------------------------------------


def direct_form_value(layer: LayerModel, plateau: PlateauProfile,
                      cutoff: WindowCutoff, mix: float,
                      refine: int = 2) -> QuadResult:
    """Quadrature the shifted energy of the full trial function directly.

    No transverse reduction: the (gradient^2 - threshold * function^2)
    integrand is integrated as-is over the layer. Only supported when the
    window wraps a full circle and the geodesic radius depends on v alone,
    so the domain splits into radial bands. Subtracting threshold-sized
    quantities limits the accuracy to ~1e-9 absolute on moderate windows;
    use this for validation, never inside a certificate.
    """
    surface = layer.surface
    if not cutoff.full_circle:
        raise ValueError("direct evaluation needs a full-circle window")
    prof = surface.radial
    if prof is None:
        raise ValueError("direct evaluation needs a radial structure")
    a = layer.a
    k1 = np.pi / (2.0 * a)
    chart = cutoff.chart

    s_grid = chart.s_samples(33)
    v_probe = np.array([cutoff.v0, cutoff.v0 + cutoff.t0 / 3.0,
                        cutoff.v0 + cutoff.t0])
    band = []
    for vv in v_probe:
        r = surface.chart_radius(s_grid, np.full_like(s_grid, vv))
        if np.max(r) - np.min(r) > 1e-9 * (1.0 + np.max(np.abs(r))):
            raise ValueError("window radii vary with s; no radial band split")
        band.append(float(np.mean(r)))
    band_lo, band_hi = band[0], band[-1]
    if not (plateau.r2 <= band_lo and band_hi <= plateau.r3):
        raise ValueError("window band must sit inside the plateau")

    total = 0.0
    err = 0.0
    u_ax = Axis(-a, a, panels=4, order=12)

    def radial_f(r, u):
        t = radial_layer_terms(prof, r, u)
        g = ground_mode(u, a)
        dg = ground_slope(u, a)
        val = plateau.value(r)
        sl = plateau.slope(r)
        return (g * g * sl * sl * t["inv_rr"]
                + (dg * dg - k1 * k1 * g * g) * val * val) * t["density"]

    for lo, hi in ((plateau.r1, band_lo), (band_hi, plateau.r4)):
        for ax in _graded_axes(lo, hi, breaks=(plateau.r2, plateau.r3)
                               + tuple(prof.breaks)):
            res = integrate_fixed(radial_f, [ax, u_ax], refine=refine)
            total += res.value
            err += res.error

    s_ax, v_ax = _window_axes(cutoff, panels_s=4, panels_v=4, order=10)
    u_ax3 = Axis(-a, a, panels=2, order=10)

    def box_f(s, v, u):
        lt = chart_layer_terms(chart, s, v, u)
        g = ground_mode(u, a)
        dg = ground_slope(u, a)
        jj = cutoff.value(s, v)
        js, jv = cutoff.grad(s, v)
        phi = g + mix * u * g * jj
        dphi_u = dg + mix * (g + u * dg) * jj
        grad_sq = (mix * u * g) ** 2 * (
            lt["inv_ss"] * js * js + 2.0 * lt["inv_sv"] * js * jv
            + lt["inv_vv"] * jv * jv)
        return (grad_sq + dphi_u * dphi_u - k1 * k1 * phi * phi) * lt["density"]

    res = integrate_fixed(box_f, [s_ax, v_ax, u_ax3], refine=refine)
    total += res.value
    err += res.error
    return QuadResult(value=total, error=err, levels=refine, n_evals=res.n_evals)


# ---------------------------------------------------------------------------
# The certificate search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of the variational search.

    verdict "certified" means value_at_star + error_at_star < 0: the trial
    family pushes the Rayleigh quotient strictly below the slab threshold.
    verdict "not_found" is returned for flat tails where the cross coupling
    vanishes identically; it is a structural no, not a search failure.
    """

    verdict: str
    threshold: float
    reason: str
    params: TestFunctionParams | None = None
    decomposition: QuadraticFormDecomposition | None = None
    rayleigh_quotient: float | None = None
    margin: float | None = None
    quad_refine: int = 1
    search_log: tuple = ()
    n_evals: int = 0

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "threshold": self.threshold,
            "reason": self.reason,
            "rayleigh_quotient": self.rayleigh_quotient,
            "margin": self.margin,
            "n_evals": self.n_evals,
            "quad_refine": self.quad_refine,
        }
        if self.params is not None:
            out["params"] = dataclasses.asdict(self.params)
        if self.decomposition is not None:
            d = self.decomposition
            out["decomposition"] = {
                "q0": d.q0, "q1": d.q1, "q2": d.q2,
                "m0": d.m0, "m1": d.m1, "m2": d.m2,
                "err_q0": d.err_q0, "err_q1": d.err_q1, "err_q2": d.err_q2,
                "err_m0": d.err_m0, "err_m1": d.err_m1, "err_m2": d.err_m2,
                "eps_star": d.eps_star, "value_at_star": d.value_at_star,
                "error_at_star": d.error_at_star,
                "discriminant": d.discriminant,
            }
        out["search_log"] = list(self.search_log)
        return out


def _tail_is_flat(chart: RuledChart) -> bool:
    """True when the shape numerator vanishes identically on the chart.

    Coefficient-level test: all three numerator coefficients below DEG_TOL
    relative to the common coefficient scale means zero mean curvature, so
    the cross coupling integrand is identically zero.
    """
    prof = coefficient_profile(chart)
    s = prof.s_grid
    n0, n1, n2, d1, d2 = (np.asarray(x, dtype=float)
                          for x in prof.coefficient_arrays(s))
    scale = max(1.0, *(float(np.max(np.abs(arr)))
                       for arr in (n0, n1, n2, d1, d2)))
    return all(float(np.max(np.abs(arr))) <= DEG_TOL * scale
               for arr in (n0, n1, n2))


def _sign_stable_start(chart: RuledChart, s_window: tuple[float, float],
                       v_from: float, n_s: int = 65) -> float:
    """Smallest doubling-scan v where the shape numerator keeps one sign."""
    prof = coefficient_profile(chart)
    s = np.linspace(s_window[0], s_window[1], n_s)
    v = max(v_from, 1e-6)
    for _ in range(40):
        signs = set()
        for mult in (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0):
            num = np.asarray(prof.shape_numerator(s, np.full_like(s, v * mult)))
            if np.all(num > 0):
                signs.add(1)
            elif np.all(num < 0):
                signs.add(-1)
            else:
                signs.add(0)
                break
        if signs in ({1}, {-1}):
            return v
        v *= 2.0
    raise SearchExhausted(
        "no ruling scale with a sign-stable mean curvature on the window")


def _select_s_window(chart: RuledChart) -> tuple[tuple[float, float], bool]:
    """Window in s: the full circle on periodic charts, else a 90% sector.

    On sector charts, narrows to the stable degree window when the full
    sector is degree-unstable.
    """
    s_lo, s_hi = chart.s_range
    if chart.periodic:
        return (s_lo, s_hi), True
    length = s_hi - s_lo
    base = (s_lo + 0.05 * length, s_hi - 0.05 * length)
    prof = coefficient_profile(chart)
    try:
        deg = classify_degrees(prof, base)
        if not deg.stable:
            return tuple(deg.stable_window), False
    except UnstableWindow:
        pass
    return base, False


def _radii_for_window(surface: SurfaceModel, rmin: float, rmax: float,
                      log_ratio: float) -> tuple | None:
    """Plateau radii wrapping the window band [rmin, rmax] at ratio e^logX."""
    x = math.exp(log_ratio)
    r2 = rmin / SUPPORT_PAD
    r3 = rmax * SUPPORT_PAD
    floor = surface.r_core * SUPPORT_PAD if surface.r_core > 0 else 0.0
    r1 = max(r2 / x, floor)
    if not r1 < r2 * (1.0 - 1e-9):
        return None
    r4 = r3 * x
    r_valid = surface.radial.r_max_valid if surface.radial else np.inf
    if r4 > r_valid:
        r4 = 0.98 * r_valid
        if r4 < 2.0 * r3:
            return None
    return r1, r2, r3, r4


def _window_radius_band(surface: SurfaceModel, s_window: tuple[float, float],
                        v0: float, t0: float, n: int = 65) -> tuple[float, float]:
    s = np.linspace(s_window[0], s_window[1], n)
    radii = [surface.chart_radius(s, np.full_like(s, vv))
             for vv in (v0, v0 + 0.5 * t0, v0 + t0)]
    return float(np.min(radii)), float(np.max(radii))


def _v_for_min_radius(surface: SurfaceModel, s_window: tuple[float, float],
                      target: float, v_lo: float, v_cap: float) -> float | None:
    """Smallest v >= v_lo whose window ring radius reaches target."""
    s = np.linspace(s_window[0], s_window[1], 33)

    def rmin(v):
        return float(np.min(surface.chart_radius(s, np.full_like(s, v))))

    v = max(v_lo, 1e-6)
    if rmin(v) >= target:
        return v
    while rmin(v) < target:
        v *= 2.0
        if v > v_cap:
            return None
    lo, hi = v / 2.0, v
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if rmin(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def certify(layer: LayerModel, *, quad_refine: int = 1,
            log_ratios: Sequence[float] = (2.0, 4.0, 8.0, 16.0, 32.0),
            t0_doublings: int = 10,
            max_form_evals: int = 80) -> Certificate:
    """Search for a trial function certifying spectrum below the threshold.

    Deterministic ladder: for each capacity ratio (outer/inner plateau radius
    = e^logX), the window start is placed where the mean curvature keeps one
    sign (and, for surfaces with a core, far enough out that the inner ramp
    fits), then the window extent t0 doubles until the margin stops
    improving. First certified candidate wins (smallest t0, then smallest
    r4). Flat tails short-circuit to a not_found certificate; exhausting the
    budget on a curved tail raises SearchExhausted, which is not a disproof.
    """
    surface = layer.surface
    chart = surface.chart

    if _tail_is_flat(chart):
        return _flat_certificate(layer, quad_refine)

    if surface.radial is None or surface.radius_of_point is None:
        raise ValueError(
            f"surface {surface.label!r} has a curved ruled tail but no radial "
            "structure; the plateau construction needs geodesic radii")

    s_window, full_circle = _select_s_window(chart)
    s_center = 0.5 * (s_window[0] + s_window[1])
    if full_circle:
        eps_w = 0.5 * (chart.s_range[1] - chart.s_range[0])
    else:
        eps_w = 0.45 * (s_window[1] - s_window[0])

    prof = coefficient_profile(chart)
    v_dom = dominance_scale(prof, s_window)
    v_sign = _sign_stable_start(chart, s_window, v_dom)
    v_cap = chart.v_range[1] * 0.99 if np.isfinite(chart.v_range[1]) else 1e12

    search_log: list[dict] = []
    certified: list[tuple] = []
    best_margin = float("inf")
    n_evals = 0

    for log_ratio in log_ratios:
        if surface.r_core > 0:
            target = surface.r_core * SUPPORT_PAD * math.exp(log_ratio) * 1.1
            v_t = _v_for_min_radius(surface, s_window, target, v_sign, v_cap)
            if v_t is None:
                continue
            v0 = max(v_sign, v_t)
        else:
            v0 = v_sign
        t_base = max(1.0, 0.5 * v0)
        prev_margin = None
        for k in range(t0_doublings + 1):
            t0 = t_base * 2.0 ** k
            if v0 + t0 >= v_cap:
                break
            alpha = t0 / 8.0 if full_circle else min(t0 / 8.0, eps_w / 4.0)
            rmin, rmax = _window_radius_band(surface, s_window, v0, t0)
            radii = _radii_for_window(surface, rmin, rmax, log_ratio)
            if radii is None:
                break
            params = TestFunctionParams(
                r1=radii[0], r2=radii[1], r3=radii[2], r4=radii[3],
                eps_w=eps_w, v0=v0, t0=t0, alpha=alpha, s_center=s_center,
                full_circle=full_circle)
            if n_evals >= max_form_evals:
                raise SearchExhausted(
                    f"form evaluation budget ({max_form_evals}) exhausted; "
                    f"best margin {best_margin:.4g}; not a disproof")
            plateau = plateau_psi(surface, *radii)
            cut = cutoff_j(chart, params, surface=surface)
            dec = quadratic_form(layer, plateau, cut, refine=quad_refine)
            n_evals += 1
            margin = dec.value_at_star + dec.error_at_star
            best_margin = min(best_margin, margin)
            search_log.append({
                "log_ratio": log_ratio, "v0": v0, "t0": t0,
                "value_at_star": dec.value_at_star,
                "error_at_star": dec.error_at_star, "margin": margin,
            })
            if margin < 0.0:
                certified.append((t0, params.r4, params, dec))
                break
            if (prev_margin is not None
                    and prev_margin - margin <= 0.02 * abs(prev_margin)):
                break
            prev_margin = margin
        if certified:
            break

    if not certified:
        raise SearchExhausted(
            f"no certified trial function within the ladder (best margin "
            f"{best_margin:.4g} over {n_evals} evaluations); absence of a "
            "certificate is not a disproof")

    certified.sort(key=lambda c: (c[0], c[1]))
    _, _, params, dec = certified[0]
    params = dataclasses.replace(params, epsilon=dec.eps_star)
    return Certificate(
        verdict="certified", threshold=layer.threshold,
        reason="quadratic minimum negative beyond quadrature error",
        params=params, decomposition=dec,
        rayleigh_quotient=dec.rayleigh(dec.eps_star),
        margin=dec.value_at_star + dec.error_at_star,
        quad_refine=quad_refine, search_log=tuple(search_log),
        n_evals=n_evals)


def _flat_certificate(layer: LayerModel, quad_refine: int) -> Certificate:
    """Canonical not_found certificate for tails with zero mean curvature.

    The cross coefficient is identically zero, so the quadratic is
    q0 + mix^2 q2 >= 0 and the discriminant is provably nonpositive. When
    the surface carries radii, one canonical window is evaluated so the
    report shows the vanishing explicitly.
    """
    surface = layer.surface
    chart = surface.chart
    reason = ("tail mean curvature vanishes identically; the cross coupling "
              "is zero and the quadratic stays nonnegative")
    if surface.radial is None or surface.radius_of_point is None:
        return Certificate(verdict="not_found", threshold=layer.threshold,
                           reason=reason, quad_refine=quad_refine)

    s_window, full_circle = _select_s_window(chart)
    s_center = 0.5 * (s_window[0] + s_window[1])
    prof = coefficient_profile(chart)
    v0 = dominance_scale(prof, s_window)
    t0 = 2.0 * max(1.0, v0)
    if full_circle:
        eps_w = 0.5 * (chart.s_range[1] - chart.s_range[0])
        alpha = t0 / 8.0
    else:
        eps_w = min(1.0, 0.45 * (s_window[1] - s_window[0]))
        s_window = (s_center - eps_w, s_center + eps_w)
        alpha = min(t0 / 8.0, eps_w / 4.0)
    rmin, rmax = _window_radius_band(surface, s_window, v0, t0)
    radii = _radii_for_window(surface, rmin, rmax, log_ratio=1.0)
    if radii is None:
        return Certificate(verdict="not_found", threshold=layer.threshold,
                           reason=reason, quad_refine=quad_refine)
    params = TestFunctionParams(
        r1=radii[0], r2=radii[1], r3=radii[2], r4=radii[3], eps_w=eps_w,
        v0=v0, t0=t0, alpha=alpha, s_center=s_center,
        full_circle=full_circle, epsilon=0.0)
    plateau = plateau_psi(surface, *radii)
    cut = cutoff_j(chart, params, surface=surface)
    dec = quadratic_form(layer, plateau, cut, refine=quad_refine)
    return Certificate(
        verdict="not_found", threshold=layer.threshold, reason=reason,
        params=params, decomposition=dec,
        rayleigh_quotient=dec.rayleigh(0.0),
        margin=dec.value_at_star + dec.error_at_star,
        quad_refine=quad_refine, n_evals=1)


def verify_certificate(layer: LayerModel, cert: Certificate,
                       extra_refine: int = 1) -> dict:
    """Re-evaluate a certificate at a finer quadrature and compare.

    The re-evaluated value at the frozen mixing weight must agree with the
    stored one within the sum of both error bounds.
    """
    if cert.params is None or cert.decomposition is None:
        raise ValueError("certificate carries no evaluated decomposition")
    surface = layer.surface
    params = cert.params
    plateau = plateau_psi(surface, params.r1, params.r2, params.r3, params.r4)
    cut = cutoff_j(surface.chart, params, surface=surface)
    dec = quadratic_form(layer, plateau, cut,
                         refine=cert.quad_refine + extra_refine)
    mix = params.epsilon if params.epsilon is not None else 0.0
    value_old = cert.decomposition.value(mix)
    value_new = dec.value(mix)
    bound = (cert.decomposition.error_value(mix) + dec.error_value(mix)
             + 1e-13 * max(1.0, abs(value_old)))
    ok = abs(value_new - value_old) <= bound
    still = (cert.verdict != "certified"
             or dec.value_at_star + dec.error_at_star < 0.0)
    return {
        "ok": bool(ok and still),
        "consistent": bool(ok),
        "still_certified": bool(still),
        "value_old": value_old,
        "value_new": value_new,
        "bound": bound,
        "eps_star_new": dec.eps_star,
    }
