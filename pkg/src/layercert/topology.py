"""Total curvature, end constants, and the classical identities.

For rotationally symmetric models everything reduces to 1D radial
quadrature of the profile data. Surfaces without radial structure (the
helicoid) are integrated over exhausting diamonds in chart coordinates,
which is enough to detect the divergences the checks must flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import RuledChart, shape_norm_sq, gauss_curvature, first_form_det
from .errors import NonconvergentTail
from .quadrature import Axis, integrate, radial_integral
from .surfaces import SurfaceModel

HARTMAN_TOL = 0.02  # fraction of 2*pi
WHITE_TOL = 0.05


def _diamond_integral(chart: RuledChart, f, radius: float,
                      target_rel: float = 1e-9) -> float:
    """Integral of f(s, v) over the diamond |s| + |v| <= radius.

    Maps the diamond onto a (p, q) rectangle by v = q*(radius - |p|); the
    kink at p = 0 sits on a panel break. Used for exhaustion sequences on
    charts without radial structure.
    """
    lo = max(chart.s_range[0], -radius)
    hi = min(chart.s_range[1], radius)

    def g(p, q):
        width = radius - np.abs(p)
        return f(p, q * width) * width

    axes = [Axis(lo, hi, breaks=(0.0,) if lo < 0.0 < hi else ()),
            Axis(-1.0, 1.0)]
    return integrate(g, axes, target_rel=target_rel, target_abs=1e-13).value


def _tail_fit(grid, values):
    """Fit value = limit + c/R on the last four rungs; (limit, tail_bound)."""
    r = np.asarray(grid[-4:], dtype=float)
    y = np.asarray(values[-4:], dtype=float)
    design = np.stack([np.ones_like(r), 1.0 / r], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    res = float(np.max(np.abs(fitted - y)))
    limit = float(coef[0])
    return limit, abs(limit - float(y[-1])) + res


def _require_cauchy(grid, values, what: str, tol: float = 1e-3):
    inc = np.abs(np.diff(np.asarray(values, dtype=float)))
    scale = max(1.0, float(np.max(np.abs(values))))
    growing = len(inc) >= 2 and inc[-1] > inc[-2] * 1.05 + 1e-12 * scale
    if growing or inc[-1] > tol * scale:
        raise NonconvergentTail(
            f"{what}: truncation increments do not settle "
            f"(last two: {inc[-2]:.3e}, {inc[-1]:.3e})")


def total_curvature(surface: SurfaceModel, r_grid=None) -> tuple[float, float, list]:
    """Integral of the Gauss curvature, extrapolated over an exhaustion.

    Returns (value, tail_estimate, truncation list). Radial models integrate
    K(r) * total circumference; chartwise models use diamond exhaustion.
    Raises NonconvergentTail when the truncations are not Cauchy.
    """
    if surface.radial is not None:
        prof = surface.radial
        if r_grid is None:
            r1 = max(1.0, 2.0 * surface.r_core)
            r_grid = [r1 * 2.0 ** k for k in range(7)]
        r_grid = [float(r) for r in r_grid]
        if r_grid[-1] > prof.r_max_valid:
            raise ValueError("r_grid beyond tabulated radial profile")

        def integrand(r):
            return prof.gauss(r) * prof.sigma_total(r)

        values = [radial_integral(integrand, 0.0, R, breaks=prof.breaks).value
                  for R in r_grid]
    else:
        chart = surface.chart
        if r_grid is None:
            cap = min(-chart.s_range[0], chart.s_range[1])
            r_grid = [cap * 2.0 ** k for k in range(-4, 1)]
        r_grid = [float(r) for r in r_grid]

        def f(s, v):
            return gauss_curvature(chart, s, v) * np.sqrt(
                first_form_det(chart, s, v))

        values = [_diamond_integral(chart, f, R) for R in r_grid]

    _require_cauchy(r_grid, values, f"total curvature of {surface.label}")
    limit, tail = _tail_fit(r_grid, values)
    return limit, tail, values


def isoperimetric_constants(surface: SurfaceModel, r_grid=None) -> list[float]:
    """Per-end limits of Area(ball)/(pi r^2), by 1/r-corrected least squares."""
    if surface.radial is None:
        raise ValueError(
            f"surface {surface.label!r} has no radial structure; "
            "end constants undefined")
    prof = surface.radial
    if r_grid is None:
        r1 = max(2.0, 4.0 * surface.r_core)
        r_grid = [r1 * 2.0 ** k for k in range(7)]
    r_grid = [float(r) for r in r_grid]
    ratios = []
    for R in r_grid:
        area_end = radial_integral(
            lambda r: np.asarray(prof.circumference(r), dtype=float),
            0.0, R, breaks=prof.breaks).value
        ratios.append(area_end / (np.pi * R * R))
    lam, _ = _tail_fit(r_grid, ratios)
    if lam < -1e-6:
        raise NonconvergentTail(
            f"negative end constant {lam:.3e} on {surface.label}")
    lam = max(lam, 0.0)
    return [lam] * prof.sheets


def hartman_residual(surface: SurfaceModel, r_grid=None) -> tuple[float, float]:
    """Residual of: total curvature / 2 pi = Euler char - sum of end constants."""
    total, tail, _ = total_curvature(surface, r_grid)
    lams = isoperimetric_constants(surface)
    res = total / (2.0 * np.pi) - surface.euler_characteristic + sum(lams)
    return float(res), tail / (2.0 * np.pi)


def a2_truncations(surface: SurfaceModel, r_grid=None) -> tuple[list, list]:
    """Truncated integrals of the squared second-form norm over an exhaustion."""
    if surface.radial is not None:
        prof = surface.radial
        if r_grid is None:
            r1 = max(1.0, 2.0 * surface.r_core)
            r_grid = [r1 * 2.0 ** k for k in range(7)]
        r_grid = [float(r) for r in r_grid]

        def integrand(r):
            km = np.asarray(prof.kappa_m(r), dtype=float)
            kp = np.asarray(prof.kappa_p(r), dtype=float)
            return (km * km + kp * kp) * prof.sigma_total(r)

        values = [radial_integral(integrand, 0.0, R, breaks=prof.breaks).value
                  for R in r_grid]
    else:
        chart = surface.chart
        if r_grid is None:
            cap = min(-chart.s_range[0], chart.s_range[1])
            r_grid = [cap * 2.0 ** k for k in range(-4, 1)]
        r_grid = [float(r) for r in r_grid]

        def f(s, v):
            return shape_norm_sq(chart, s, v) * np.sqrt(
                first_form_det(chart, s, v))

        values = [_diamond_integral(chart, f, R) for R in r_grid]
    return r_grid, values


@dataclass(frozen=True)
class WhiteReport:
    verdict: str  # "convergent" or "divergent"
    a2_truncations: tuple
    grid: tuple
    rate: str
    white_residual: float | None  # distance of totalK/4pi from nearest integer


def white_check(surface: SurfaceModel, r_grid=None,
                tau_white: float = WHITE_TOL) -> WhiteReport:
    """Quantization check: finite bending energy forces integer totalK/4pi."""
    grid, values = a2_truncations(surface, r_grid)
    vals = np.asarray(values, dtype=float)
    inc = np.diff(vals)
    scale = max(1.0, float(np.max(np.abs(vals))))
    convergent = bool(np.all(inc[-3:] <= 1e-3 * scale)
                      and np.all(np.diff(inc[-3:]) <= 1e-12 * scale))
    if convergent:
        rate = "tail_cauchy"
    else:
        x = np.log(np.asarray(grid[-4:]))
        coef = np.polyfit(x, vals[-4:], 1)
        res = float(np.sqrt(np.mean((np.polyval(coef, x) - vals[-4:]) ** 2)))
        rate = "log" if res <= 0.05 * max(1.0, abs(float(coef[0]))) else "polynomial"

    residual = None
    if convergent:
        total, _, _ = total_curvature(surface, None)
        q = total / (4.0 * np.pi)
        residual = float(abs(q - np.round(q)))
        if residual >= tau_white:
            raise NonconvergentTail(
                f"white quantization violated on {surface.label}: "
                f"totalK/4pi = {q:.6f}")
    return WhiteReport(
        verdict="convergent" if convergent else "divergent",
        a2_truncations=tuple(values), grid=tuple(grid), rate=rate,
        white_residual=residual)


@dataclass(frozen=True)
class TopologyReport:
    label: str
    euler_characteristic: int
    total_k: float
    total_k_tail: float
    lambdas: tuple
    hartman_residual: float
    hartman_tail: float
    huber_slack: float  # 2 pi chi - total K, must be >= -tail
    a2_verdict: str
    a2_last: float
    white_residual: float | None


def topology_report(surface: SurfaceModel) -> TopologyReport:
    total, tail, _ = total_curvature(surface)
    lams = isoperimetric_constants(surface)
    res = total / (2.0 * np.pi) - surface.euler_characteristic + sum(lams)
    white = white_check(surface)
    huber = 2.0 * np.pi * surface.euler_characteristic - total
    return TopologyReport(
        label=surface.label,
        euler_characteristic=surface.euler_characteristic,
        total_k=total, total_k_tail=tail, lambdas=tuple(lams),
        hartman_residual=float(res), hartman_tail=tail / (2.0 * np.pi),
        huber_slack=float(huber),
        a2_verdict=white.verdict,
        a2_last=float(white.a2_truncations[-1]),
        white_residual=white.white_residual)
