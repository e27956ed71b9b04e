"""Surface catalog: ruled charts plus rotationally symmetric radial data.

Each surface bundles an outer ruled chart in gauge with, when the surface is
rotationally symmetric, a radial profile describing circumference and
principal curvatures as functions of the geodesic radius measured from the
basepoint. Radii follow the meridian-arclength convention: on surfaces with a
pole the radius is the distance from the pole; on waist surfaces (cylinder,
hyperboloid) it is the distance from the waist circle, so every quantity
lives on one sheet and `sheets` counts the identical copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .charts import RuledChart, chart_position, metric_terms, orthonormalize_chart
from .curves import Curve, circle_curve, constant_direction, line_curve
from .errors import ThicknessViolation

GLUE_TOL = 1e-8


@dataclass(frozen=True)
class RadialProfile:
    """Radial data of a rotationally symmetric surface, per sheet.

    All callables are vectorized in the geodesic radius r >= 0. kappa_m is
    the meridian principal curvature, kappa_p the parallel one, both taken
    against the same normal that orients the chart. `sheets` is the number
    of identical copies glued along r = 0 (2 for waist surfaces).
    """

    circumference: Callable
    kappa_m: Callable
    kappa_p: Callable
    sheets: int = 1
    breaks: tuple = ()
    r_max_valid: float = np.inf
    pole: bool = True

    def sigma_total(self, r):
        return self.sheets * np.asarray(self.circumference(r), dtype=float)

    def gauss(self, r):
        return np.asarray(self.kappa_m(r), dtype=float) * np.asarray(
            self.kappa_p(r), dtype=float)

    def mean(self, r):
        return np.asarray(self.kappa_m(r), dtype=float) + np.asarray(
            self.kappa_p(r), dtype=float)


@dataclass(frozen=True)
class SurfaceModel:
    """A catalog surface: outer gauge chart + optional radial description."""

    label: str
    chart: RuledChart
    params: dict
    euler_characteristic: int
    basepoint: np.ndarray
    radial: RadialProfile | None = None
    r_core: float = 0.0  # geodesic radius of the non-ruled core (0 if none)
    kappa_sup: float = 0.0  # sup over the surface of max |principal curvature|
    radius_of_point: Callable | None = None  # xyz -> geodesic radius
    notes: str = ""

    def chart_radius(self, s, v):
        """Geodesic radius of chart points; needs a radial description."""
        if self.radius_of_point is None:
            raise ValueError(
                f"surface {self.label!r} has no radial structure; "
                "geodesic radii are undefined")
        s = np.asarray(s, dtype=float)
        v = np.asarray(v, dtype=float)
        s, v = np.broadcast_arrays(s, v)
        return self.radius_of_point(chart_position(self.chart, s, v))

    def area_of_ball(self, r, n: int = 4096):
        """Area of the geodesic ball (band for waist surfaces) of radius r."""
        if self.radial is None:
            raise ValueError(f"surface {self.label!r} has no radial structure")
        r = float(r)
        grid = np.linspace(0.0, r, n + 1)
        sig = self.radial.sigma_total(grid)
        return float(np.trapezoid(sig, grid))


# ---------------------------------------------------------------------------
# Catalog builders
# ---------------------------------------------------------------------------

_BIG = 1e9


def plane() -> SurfaceModel:
    chart = RuledChart(
        directrix=line_curve((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
        ruling=constant_direction((0.0, 1.0, 0.0)),
        s_range=(-_BIG, _BIG), v_range=(-_BIG, _BIG),
        periodic=False, orientation=1, label="plane",
    )
    zero = lambda r: np.zeros(np.shape(r))
    radial = RadialProfile(
        circumference=lambda r: 2.0 * np.pi * np.asarray(r, dtype=float),
        kappa_m=zero, kappa_p=zero, sheets=1, pole=True,
    )
    return SurfaceModel(
        label="plane", chart=chart, params={},
        euler_characteristic=1, basepoint=np.zeros(3), radial=radial,
        r_core=0.0, kappa_sup=0.0,
        radius_of_point=lambda x: np.hypot(x[..., 0], x[..., 1]),
    )


def cylinder(radius: float = 1.0) -> SurfaceModel:
    """Infinite round cylinder; radius measured from the waist circle z=0."""
    if radius <= 0:
        raise ValueError("cylinder radius must be positive")
    rr = float(radius)
    chart = RuledChart(
        directrix=circle_curve(rr),
        ruling=constant_direction((0.0, 0.0, 1.0)),
        s_range=(0.0, 2.0 * np.pi * rr), v_range=(-_BIG, _BIG),
        periodic=True, orientation=1, label=f"cylinder(r={rr:g})",
    )
    zero = lambda r: np.zeros(np.shape(r))
    radial = RadialProfile(
        circumference=lambda r: np.full(np.shape(r), 2.0 * np.pi * rr),
        kappa_m=zero,
        kappa_p=lambda r: np.full(np.shape(r), -1.0 / rr),
        sheets=2, pole=False,
    )
    return SurfaceModel(
        label="cylinder", chart=chart, params={"radius": rr},
        euler_characteristic=0, basepoint=np.array([rr, 0.0, 0.0]),
        radial=radial, r_core=0.0, kappa_sup=1.0 / rr,
        radius_of_point=lambda x: np.abs(x[..., 2]),
    )


def helicoid(pitch: float = 1.0, s_window: tuple[float, float] = (-6.0 * np.pi, 6.0 * np.pi)
             ) -> SurfaceModel:
    """Helicoid swept by horizontal rulings rotating with height.

    Not rotationally symmetric; carries no radial structure. Minimal
    (mean curvature identically zero), Gauss curvature -pitch^2/(pitch^2+v^2)^2.
    """
    c = float(pitch)
    if c <= 0:
        raise ValueError("helicoid pitch must be positive")

    def ruling_fn(s):
        s = np.asarray(s, dtype=float)
        return np.stack([np.cos(s / c), np.sin(s / c), np.zeros_like(s)], axis=-1)

    def ruling_d1(s):
        s = np.asarray(s, dtype=float)
        return np.stack([-np.sin(s / c) / c, np.cos(s / c) / c,
                         np.zeros_like(s)], axis=-1)

    def ruling_d2(s):
        s = np.asarray(s, dtype=float)
        return np.stack([-np.cos(s / c) / c ** 2, -np.sin(s / c) / c ** 2,
                         np.zeros_like(s)], axis=-1)

    chart = RuledChart(
        directrix=line_curve((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
        ruling=Curve(ruling_fn, ruling_d1, ruling_d2, label="helicoid-ruling"),
        s_range=(float(s_window[0]) * c, float(s_window[1]) * c),
        v_range=(-_BIG, _BIG),
        periodic=False, orientation=1, label=f"helicoid(c={c:g})",
    )
    return SurfaceModel(
        label="helicoid", chart=chart,
        params={"pitch": c, "s_window": (float(s_window[0]), float(s_window[1]))},
        euler_characteristic=1, basepoint=np.zeros(3), radial=None,
        r_core=0.0, kappa_sup=1.0 / c, radius_of_point=None,
        notes="minimal ruled surface; no radial structure",
    )


def capped_cone(half_angle: float = np.pi / 4, cap_radius: float = 0.4) -> SurfaceModel:
    """Round cone smoothed by an inscribed sphere cap, C^1 across the join.

    half_angle is the angle between the axis and the generators; cap_radius
    is the radius of the inscribed sphere. The basepoint is the cap pole;
    geodesic radii run along the meridian (through the cap, then straight up
    the generator). The ruled chart covers the cone part, v = slant distance
    from the join circle.
    """
    alpha = float(half_angle)
    rho_s = float(cap_radius)
    if not 0 < alpha < np.pi / 2:
        raise ValueError("half_angle must lie in (0, pi/2)")
    if rho_s <= 0:
        raise ValueError("cap_radius must be positive")
    sin_a, cos_a = np.sin(alpha), np.cos(alpha)
    ell_join = rho_s * cos_a / sin_a      # slant length of the join circle
    rho_join = ell_join * sin_a           # = rho_s cos(alpha), circle radius
    z_join = ell_join * cos_a
    r_join = rho_s * (np.pi / 2 - alpha)  # geodesic radius of the join
    z_center = rho_s / sin_a              # inscribed sphere center (on axis)
    pole = np.array([0.0, 0.0, z_center - rho_s])

    # Directrix: join circle, arclength parametrized; ruling: generators.
    directrix = circle_curve(rho_join, z=z_join)

    def gen_fn(s):
        s = np.asarray(s, dtype=float)
        th = s / rho_join
        return np.stack([sin_a * np.cos(th), sin_a * np.sin(th),
                         cos_a * np.ones_like(th)], axis=-1)

    def gen_d1(s):
        s = np.asarray(s, dtype=float)
        th = s / rho_join
        k = sin_a / rho_join
        return np.stack([-k * np.sin(th), k * np.cos(th), np.zeros_like(th)], axis=-1)

    def gen_d2(s):
        s = np.asarray(s, dtype=float)
        th = s / rho_join
        k = sin_a / rho_join ** 2
        return np.stack([-k * np.cos(th), -k * np.sin(th), np.zeros_like(th)], axis=-1)

    chart = RuledChart(
        directrix=directrix,
        ruling=Curve(gen_fn, gen_d1, gen_d2, label="cone-generators"),
        s_range=(0.0, 2.0 * np.pi * rho_join), v_range=(0.0, 1e12),
        periodic=True, orientation=1,
        label=f"capped_cone(alpha={alpha:g}, cap={rho_s:g})",
    )

    def circumference(r):
        r = np.asarray(r, dtype=float)
        cap = 2.0 * np.pi * rho_s * np.sin(np.clip(r, 0.0, r_join) / rho_s)
        cone = 2.0 * np.pi * sin_a * (ell_join + (r - r_join))
        return np.where(r <= r_join, cap, cone)

    def kappa_m(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= r_join, -1.0 / rho_s, 0.0)

    def kappa_p(r):
        r = np.asarray(r, dtype=float)
        ell = ell_join + np.maximum(r - r_join, 0.0)
        return np.where(r <= r_join, -1.0 / rho_s, -cos_a / (sin_a * ell))

    radial = RadialProfile(
        circumference=circumference, kappa_m=kappa_m, kappa_p=kappa_p,
        sheets=1, breaks=(r_join,), pole=True,
    )

    def radius_of_point(x):
        # slant distance from the (virtual) apex at the origin
        slant = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        return r_join + (slant - ell_join)

    return SurfaceModel(
        label="capped_cone", chart=chart,
        params={"half_angle": alpha, "cap_radius": rho_s},
        euler_characteristic=1, basepoint=pole, radial=radial,
        r_core=r_join, kappa_sup=1.0 / rho_s,
        radius_of_point=radius_of_point,
        notes="C^1 glue of sphere cap and cone along the inscribed circle",
    )


def hyperboloid(a_h: float = 1.0, c_h: float = 1.0,
                sector: tuple[float, float] = (-0.875 * np.pi, 0.875 * np.pi),
                z_max: float = 1e7) -> SurfaceModel:
    """One-sheeted hyperboloid of revolution, waist radius a_h.

    Profile rho(z) = a_h * sqrt(1 + z^2/c_h^2). Doubly ruled; the outer chart
    is one ruling family brought to gauge on an angular sector (the family
    has holonomy, so no closed gauge directrix exists). Radial structure:
    geodesic radius = meridian arclength from the waist, two sheets.
    """
    ah, ch = float(a_h), float(c_h)
    if ah <= 0 or ch <= 0:
        raise ValueError("hyperboloid parameters must be positive")
    norm = np.hypot(ah, ch)

    def base_fn(t):
        t = np.asarray(t, dtype=float)
        return np.stack([ah * np.cos(t), ah * np.sin(t), np.zeros_like(t)], axis=-1)

    def base_d1(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-ah * np.sin(t), ah * np.cos(t), np.zeros_like(t)], axis=-1)

    def base_d2(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-ah * np.cos(t), -ah * np.sin(t), np.zeros_like(t)], axis=-1)

    def rul_fn(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-ah * np.sin(t) / norm, ah * np.cos(t) / norm,
                         np.full_like(t, ch / norm)], axis=-1)

    def rul_d1(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-ah * np.cos(t) / norm, -ah * np.sin(t) / norm,
                         np.zeros_like(t)], axis=-1)

    def rul_d2(t):
        t = np.asarray(t, dtype=float)
        return np.stack([ah * np.sin(t) / norm, -ah * np.cos(t) / norm,
                         np.zeros_like(t)], axis=-1)

    # curvature coefficients carry the spline's second-derivative error
    # (~h^2); 8k samples keep H accurate to ~1e-8 near the waist
    chart, _ = orthonormalize_chart(
        Curve(base_fn, base_d1, base_d2, label="waist"),
        Curve(rul_fn, rul_d1, rul_d2, label="hyperboloid-ruling"),
        s_range=(float(sector[0]), float(sector[1])),
        v_range=(-1e6, 1e6), periodic=False, orientation=1,
        n_samples=8192,
        label=f"hyperboloid(a={ah:g}, c={ch:g})",
    )

    # Radial profile: exact rho(z) derivatives, numeric z <-> r maps.
    z_lin = np.linspace(0.0, 1e-3, 24, endpoint=False)
    z_log = np.geomspace(1e-3, z_max, 4096)
    z_grid = np.concatenate([z_lin, z_log])

    def rho_of_z(z):
        return ah * np.sqrt(1.0 + (z / ch) ** 2)

    def drho_of_z(z):
        return (ah / ch ** 2) * z / np.sqrt(1.0 + (z / ch) ** 2)

    def d2rho_of_z(z):
        return (ah / ch ** 2) * (1.0 + (z / ch) ** 2) ** -1.5

    w_grid = np.hypot(1.0, drho_of_z(z_grid))
    r_grid = CubicSpline(z_grid, w_grid).antiderivative()(z_grid)
    z_of_r = PchipInterpolator(r_grid, z_grid)
    r_of_z = PchipInterpolator(z_grid, r_grid)
    r_cap = float(r_grid[-1])

    def circumference(r):
        return 2.0 * np.pi * rho_of_z(z_of_r(np.asarray(r, dtype=float)))

    def kappa_m(r):
        z = z_of_r(np.asarray(r, dtype=float))
        w = np.hypot(1.0, drho_of_z(z))
        return d2rho_of_z(z) / w ** 3

    def kappa_p(r):
        z = z_of_r(np.asarray(r, dtype=float))
        w = np.hypot(1.0, drho_of_z(z))
        return -1.0 / (rho_of_z(z) * w)

    radial = RadialProfile(
        circumference=circumference, kappa_m=kappa_m, kappa_p=kappa_p,
        sheets=2, pole=False, r_max_valid=r_cap,
    )

    def radius_of_point(x):
        z = np.abs(np.asarray(x, dtype=float)[..., 2])
        if np.any(z > z_max):
            raise ValueError("point beyond tabulated hyperboloid profile")
        return r_of_z(z)

    return SurfaceModel(
        label="hyperboloid", chart=chart,
        params={"a_h": ah, "c_h": ch, "sector": (float(sector[0]), float(sector[1]))},
        euler_characteristic=0, basepoint=np.array([ah, 0.0, 0.0]),
        radial=radial, r_core=0.0,
        kappa_sup=max(ah / ch ** 2, 1.0 / ah),
        radius_of_point=radius_of_point,
        notes="gauge chart on an angular sector (ruling family has holonomy)",
    )


def tangent_developable(helix_radius: float = 1.0, helix_pitch: float = 0.3,
                        involute_offset: float = 6.0,
                        sigma_window: tuple[float, float] | None = None,
                        v_max: float = 50.0) -> SurfaceModel:
    """Tangent developable of a circular helix, in involute gauge coordinates.

    The directrix is the involute of the helix truncated at arclength
    involute_offset; with kappa, tau the helix curvature and torsion and
    w(sig) = sqrt(C^2 - 2 sig/kappa), the chart has first-form determinant
    ((w+v)/w)^2, mean curvature -(tau/kappa)/(w+v), and zero Gauss curvature.
    """
    R = float(helix_radius)
    p = float(helix_pitch)
    C = float(involute_offset)
    if R <= 0 or p <= 0 or C <= 0:
        raise ValueError("helix parameters must be positive")
    c2 = R * R + p * p
    c = np.sqrt(c2)
    kappa = R / c2
    tau = p / c2
    sig_edge = kappa * C * C / 2.0  # involute reaches the helix (w -> 0)
    if sigma_window is None:
        sigma_window = (0.05 * sig_edge, 0.75 * sig_edge)
    s_lo, s_hi = float(sigma_window[0]), float(sigma_window[1])
    if not 0 <= s_lo < s_hi < sig_edge:
        raise ValueError("sigma_window must sit inside (0, edge)")

    def frames(sig):
        """Helix Frenet frame at arclength C - w(sig), plus w."""
        sig = np.asarray(sig, dtype=float)
        w = np.sqrt(np.maximum(C * C - 2.0 * sig / kappa, 0.0))
        t_par = (C - w) / c  # helix angle parameter
        cos_t, sin_t = np.cos(t_par), np.sin(t_par)
        tangent = np.stack([-R * sin_t / c, R * cos_t / c,
                            np.full_like(t_par, p / c)], axis=-1)
        normal = np.stack([-cos_t, -sin_t, np.zeros_like(t_par)], axis=-1)
        binormal = np.stack([p * sin_t / c, -p * cos_t / c,
                             np.full_like(t_par, R / c)], axis=-1)
        point = np.stack([R * cos_t, R * sin_t, p * t_par], axis=-1)
        return point, tangent, normal, binormal, w

    def dir_fn(sig):
        point, tangent, normal, binormal, w = frames(sig)
        return point + w[..., None] * tangent

    def dir_d1(sig):
        point, tangent, normal, binormal, w = frames(sig)
        return normal

    def dir_d2(sig):
        point, tangent, normal, binormal, w = frames(sig)
        return (-kappa * tangent + tau * binormal) / (kappa * w[..., None])

    def rul_fn(sig):
        point, tangent, normal, binormal, w = frames(sig)
        return tangent

    def rul_d1(sig):
        point, tangent, normal, binormal, w = frames(sig)
        return normal / w[..., None]

    def rul_d2(sig):
        point, tangent, normal, binormal, w = frames(sig)
        return ((-kappa * tangent + tau * binormal) / (kappa * w[..., None] ** 2)
                + normal / (kappa * w[..., None] ** 3))

    chart = RuledChart(
        directrix=Curve(dir_fn, dir_d1, dir_d2, label="involute"),
        ruling=Curve(rul_fn, rul_d1, rul_d2, label="helix-tangents"),
        s_range=(s_lo, s_hi), v_range=(0.0, float(v_max)),
        periodic=False, orientation=1,
        label=f"tangent_developable(R={R:g}, p={p:g}, C={C:g})",
    )
    w_min = float(np.sqrt(C * C - 2.0 * s_hi / kappa))
    return SurfaceModel(
        label="tangent_developable", chart=chart,
        params={"helix_radius": R, "helix_pitch": p, "involute_offset": C,
                "sigma_window": (s_lo, s_hi), "v_max": float(v_max)},
        euler_characteristic=1, basepoint=np.asarray(dir_fn(s_lo), dtype=float),
        radial=None, r_core=0.0,
        kappa_sup=(tau / kappa) / w_min,
        radius_of_point=None,
        notes="flat (K=0) but non-planar; developability test target",
    )


CATALOG: dict[str, Callable] = {
    "plane": plane,
    "cylinder": cylinder,
    "helicoid": helicoid,
    "capped_cone": capped_cone,
    "hyperboloid": hyperboloid,
    "tangent_developable": tangent_developable,
}


def make_surface(name: str, **params) -> SurfaceModel:
    if name not in CATALOG:
        raise KeyError(f"unknown surface {name!r}; have {sorted(CATALOG)}")
    return CATALOG[name](**params)


def check_core_glue(surface: SurfaceModel, n: int = 64, tol: float = GLUE_TOL) -> dict:
    """C^1 agreement of the radial core and the outer chart on the glue circle.

    Compares positions and ruling directions computed from the chart at
    v = v_lo against the radial profile's circumference and its derivative
    at r_core. Surfaces without a core pass trivially.
    """
    out = {"position": 0.0, "tangent": 0.0, "circumference": 0.0, "ok": True}
    if surface.r_core <= 0 or surface.radial is None:
        return out
    chart = surface.chart
    s = np.linspace(chart.s_range[0], chart.s_range[1], n, endpoint=False)
    v0 = np.full_like(s, chart.v_range[0])
    ring = chart_position(chart, s, v0)
    r_ring = surface.radius_of_point(ring)
    out["position"] = float(np.max(np.abs(r_ring - surface.r_core)))

    rho_ring = np.hypot(ring[..., 0], ring[..., 1])
    h = 1e-6 * max(1.0, surface.r_core)
    sig_in = surface.radial.circumference(surface.r_core - h)
    sig_out = surface.radial.circumference(surface.r_core + h)
    sig_chart = 2.0 * np.pi * rho_ring
    out["circumference"] = float(
        np.max(np.abs(sig_chart - 0.5 * (sig_in + sig_out))))

    # C^1: d(circumference)/dr continuous across the join
    dsig_in = (surface.radial.circumference(surface.r_core)
               - surface.radial.circumference(surface.r_core - h)) / h
    dsig_out = (surface.radial.circumference(surface.r_core + h)
                - surface.radial.circumference(surface.r_core)) / h
    out["tangent"] = float(np.abs(dsig_out - dsig_in))

    scale = max(1.0, float(np.max(sig_chart)))
    out["ok"] = bool(out["position"] <= tol * max(1.0, surface.r_core)
                     and out["circumference"] <= 1e3 * tol * scale
                     and out["tangent"] <= 1e-4 * scale)
    return out


# ---------------------------------------------------------------------------
# Layer over a surface
# ---------------------------------------------------------------------------


def layer_terms_from_metric(t: dict, u) -> dict:
    """Layer metric block from a precomputed surface metric-terms dict."""
    q, l, m = t["det"], t["l"], t["m"]
    u = np.asarray(u, dtype=float)
    shrink = 1.0 - u * l / q  # 1 - u*H along the s-block
    det_a = shrink - u * u * m * m / q  # det(I - u*shape) = 1 - uH + u^2 K
    g_ss = q * shrink * shrink + u * u * m * m
    g_sv = -u * m * (2.0 - u * l / q)
    g_vv = 1.0 + u * u * m * m / q
    det_surf = det_a * det_a * q
    density = det_a * np.sqrt(q)
    return {
        "ss": g_ss, "sv": g_sv, "vv": g_vv,
        "inv_ss": g_vv / det_surf, "inv_sv": -g_sv / det_surf,
        "inv_vv": g_ss / det_surf,
        "density": density, "det_factor": det_a, "sqrt_det": np.sqrt(q),
        "mean": t["mean"], "gauss": t["gauss"],
    }


def chart_layer_terms(chart: RuledChart, s, v, u) -> dict:
    """Pullback layer metric over chart points at normal offset u.

    Returns the surface metric block (ss, sv, vv), its inverse (inv_ss,
    inv_sv, inv_vv), and the volume density relative to ds dv du. The
    u-fiber direction is orthonormal to the surface block. Broadcasts over
    (s, v, u) arrays of a common shape.
    """
    return layer_terms_from_metric(metric_terms(chart, s, v), u)


def radial_layer_terms(profile: RadialProfile, r, u) -> dict:
    """Axisymmetric layer metric terms at geodesic radius r, offset u.

    The angular direction is integrated out: density is relative to dr du
    and already carries the total circumference. inv_rr is the inverse
    metric coefficient of the radial direction.
    """
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    km = np.asarray(profile.kappa_m(r), dtype=float)
    kp = np.asarray(profile.kappa_p(r), dtype=float)
    fm = 1.0 - u * km
    fp = 1.0 - u * kp
    sig = profile.sigma_total(r)
    return {
        "inv_rr": 1.0 / (fm * fm),
        "density": fm * fp * sig,
        "gauss": km * kp,
        "mean": km + kp,
        "sigma_total": sig,
    }


@dataclass(frozen=True)
class LayerModel:
    """The slab of half-width a around a surface, pushed along unit normals.

    Valid only while a * sup|principal curvature| <= curvature_budget < 1, so
    the normal map is a diffeomorphism and the pullback volume density
    (1 - u*kappa_1)(1 - u*kappa_2) stays positive for |u| < a.
    """

    surface: SurfaceModel
    a: float
    curvature_budget: float = 0.9

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("layer half-width a must be positive")
        if not 0 < self.curvature_budget < 1:
            raise ValueError("curvature_budget must lie in (0, 1)")
        prod = self.a * self.surface.kappa_sup
        if prod > self.curvature_budget + 1e-12:
            raise ThicknessViolation(
                f"a*sup|kappa| = {prod:.6g} exceeds budget "
                f"{self.curvature_budget:g} on {self.surface.label!r}")

    @property
    def threshold(self) -> float:
        """Essential-spectrum floor of the straight slab, (pi/2a)^2."""
        return (np.pi / (2.0 * self.a)) ** 2

    def density_factors(self, kappa_m, kappa_p, u):
        """(1-u k1)(1-u k2) volume factor; raises if it degenerates."""
        f = (1.0 - u * np.asarray(kappa_m)) * (1.0 - u * np.asarray(kappa_p))
        if np.any(f <= 0):
            raise ThicknessViolation("normal map degenerates inside the layer")
        return f
