"""Ruled charts x(s, v) = directrix(s) + v * ruling(s).

Gauge convention used throughout the package:

    |directrix'(s)| = 1,   |ruling(s)| = 1,   <directrix'(s), ruling(s)> = 0.

In gauge the first fundamental form is diag(det, 1) with

    det(s, v) = 1 + d1(s) v + d2(s) v^2,
    d1 = 2 <directrix', ruling'>,   d2 = |ruling'|^2,

and the mean curvature (sum of principal curvatures) is

    H(s, v) = shape_numerator(s, v) / det(s, v)^{3/2},
    shape_numerator = n0 + n1 v + n2 v^2,

with n0, n1, n2 the triple products of the curve derivatives against the
unnormalized normal. The Gauss curvature is K = -w0(s)^2 / det^2 where
w0 = <ruling', directrix' x ruling>; K is nonpositive on every ruled chart.
`orientation` = -1 flips the unit normal, hence the signs of the numerator
coefficients and of w0 (K is unchanged).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .curves import Curve
from .errors import DegenerateChart

GAUGE_TOL = 1e-8


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


@dataclass(frozen=True)
class RuledChart:
    """A ruled coordinate chart, expected to be in gauge (see module doc)."""

    directrix: Curve
    ruling: Curve
    s_range: tuple[float, float]
    v_range: tuple[float, float]
    periodic: bool = False
    orientation: int = 1
    label: str = "chart"

    def __post_init__(self):
        if self.orientation not in (-1, 1):
            raise ValueError("orientation must be +1 or -1")
        if not self.s_range[0] < self.s_range[1]:
            raise ValueError("empty s_range")
        if not self.v_range[0] < self.v_range[1]:
            raise ValueError("empty v_range")

    def s_samples(self, n: int = 257) -> np.ndarray:
        lo, hi = self.s_range
        if self.periodic:
            return np.linspace(lo, hi, n, endpoint=False)
        return np.linspace(lo, hi, n)

    def v_samples(self, n: int = 65, v_hi: float | None = None) -> np.ndarray:
        lo, hi = self.v_range
        if v_hi is not None:
            hi = v_hi
        if not np.isfinite(hi):
            hi = lo + max(100.0, abs(lo) * 10 + 100.0)
        return np.linspace(lo, hi, n)

    def with_orientation(self, orientation: int) -> "RuledChart":
        return replace(self, orientation=orientation)


def chart_position(chart: RuledChart, s, v):
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    return chart.directrix(s) + v[..., None] * chart.ruling(s)


def gauge_residuals(chart: RuledChart, n: int = 512) -> dict:
    """Worst-case deviations from the gauge conditions on sampled s."""
    s = chart.s_samples(n)
    b1 = chart.directrix.deriv(s)
    e = chart.ruling(s)
    return {
        "directrix_speed": float(np.max(np.abs(np.linalg.norm(b1, axis=-1) - 1.0))),
        "ruling_norm": float(np.max(np.abs(np.linalg.norm(e, axis=-1) - 1.0))),
        "orthogonality": float(np.max(np.abs(_dot(b1, e)))),
    }


def assert_in_gauge(chart: RuledChart, tol: float = GAUGE_TOL, n: int = 512) -> dict:
    res = gauge_residuals(chart, n)
    worst = max(res.values())
    if worst > tol:
        raise DegenerateChart(f"chart {chart.label!r} violates gauge: {res}")
    return res


def _coefficient_samples(chart: RuledChart, s):
    """Polynomial coefficient samples (n0, n1, n2, d1, d2, w0) at s."""
    s = np.asarray(s, dtype=float)
    b1 = chart.directrix.deriv(s)
    b2 = chart.directrix.second(s)
    e = chart.ruling(s)
    e1 = chart.ruling.deriv(s)
    e2 = chart.ruling.second(s)
    d1 = 2.0 * _dot(b1, e1)
    d2 = _dot(e1, e1)
    bxe = np.cross(b1, e)
    exe = np.cross(e1, e)
    sg = float(chart.orientation)
    n0 = sg * _dot(bxe, b2)
    n1 = sg * (_dot(exe, b2) + _dot(bxe, e2))
    n2 = sg * _dot(exe, e2)
    w0 = sg * _dot(e1, bxe)
    return n0, n1, n2, d1, d2, w0


@dataclass(frozen=True)
class CoefficientProfile:
    """Ruling-polynomial coefficients of a chart (or synthetic stand-ins).

    Callables are vectorized in s. first_form_det(s, v) = 1 + d1 v + d2 v^2
    is the determinant of the first fundamental form; shape_numerator(s, v)
    = n0 + n1 v + n2 v^2 is the numerator of det^{3/2} * H.
    """

    n0: Callable
    n1: Callable
    n2: Callable
    d1: Callable
    d2: Callable
    s_grid: np.ndarray
    label: str = "profile"

    @classmethod
    def from_chart(cls, chart: RuledChart, n_s: int = 257) -> "CoefficientProfile":
        grid = chart.s_samples(n_s)

        def make(idx):
            def f(s):
                return _coefficient_samples(chart, s)[idx]

            return f

        return cls(
            n0=make(0), n1=make(1), n2=make(2), d1=make(3), d2=make(4),
            s_grid=grid, label=f"profile({chart.label})",
        )

    @classmethod
    def from_constants(cls, n0: float, n1: float, n2: float, d1: float, d2: float,
                       s_window: tuple[float, float] = (-1.0, 1.0),
                       label: str = "synthetic") -> "CoefficientProfile":
        if d2 < 0:
            raise ValueError("d2 = |ruling'|^2 must be nonnegative")
        if d1 * d1 > 4.0 * d2 + 1e-12 * max(1.0, abs(d1)) ** 2:
            # Cauchy-Schwarz: |d1| = 2|<directrix', ruling'>| <= 2 sqrt(d2)
            raise ValueError("|d1| > 2 sqrt(d2) violates the gauge inequality")

        def const(c):
            def f(s):
                return np.full(np.shape(s), float(c))

            return f

        grid = np.linspace(s_window[0], s_window[1], 65)
        return cls(n0=const(n0), n1=const(n1), n2=const(n2),
                   d1=const(d1), d2=const(d2), s_grid=grid, label=label)

    def first_form_det(self, s, v):
        s = np.asarray(s, dtype=float)
        v = np.asarray(v, dtype=float)
        return 1.0 + self.d1(s) * v + self.d2(s) * v * v

    def shape_numerator(self, s, v):
        s = np.asarray(s, dtype=float)
        v = np.asarray(v, dtype=float)
        return self.n0(s) + self.n1(s) * v + self.n2(s) * v * v

    def ratio(self, s, v):
        """shape_numerator / first_form_det, the sector integrand."""
        return self.shape_numerator(s, v) / self.first_form_det(s, v)

    def coefficient_arrays(self, s):
        s = np.asarray(s, dtype=float)
        return (self.n0(s), self.n1(s), self.n2(s), self.d1(s), self.d2(s))


def coefficient_profile(chart: RuledChart, n_s: int = 257) -> CoefficientProfile:
    """Sample the ruling-polynomial coefficients of a chart in gauge."""
    return CoefficientProfile.from_chart(chart, n_s=n_s)


def first_form_det(chart: RuledChart, s, v):
    n0, n1, n2, d1, d2, w0 = _coefficient_samples(chart, np.asarray(s, dtype=float))
    v = np.asarray(v, dtype=float)
    return 1.0 + d1 * v + d2 * v * v


def mean_curvature(chart: RuledChart, s, v):
    """Sum-of-principal-curvatures mean curvature at (s, v)."""
    n0, n1, n2, d1, d2, w0 = _coefficient_samples(chart, np.asarray(s, dtype=float))
    v = np.asarray(v, dtype=float)
    det = 1.0 + d1 * v + d2 * v * v
    num = n0 + n1 * v + n2 * v * v
    return num / det ** 1.5


def gauss_curvature(chart: RuledChart, s, v):
    """Gauss curvature K = -w0^2/det^2; nonpositive on ruled charts."""
    n0, n1, n2, d1, d2, w0 = _coefficient_samples(chart, np.asarray(s, dtype=float))
    v = np.asarray(v, dtype=float)
    det = 1.0 + d1 * v + d2 * v * v
    return -(w0 * w0) / (det * det)


@dataclass(frozen=True)
class SecondFormShape:
    """Second fundamental form entries and the shape operator at (s, v).

    In gauge the form is [[l, m], [m, 0]] (the ruling direction is asymptotic),
    the shape operator [[l/det, m/det], [m, 0]], and the principal curvatures
    solve k^2 - H k + K = 0.
    """

    l: np.ndarray
    m: np.ndarray
    n: np.ndarray
    shape_operator: np.ndarray  # (..., 2, 2)
    principal: np.ndarray  # (..., 2), ascending

    @property
    def mean(self):
        return self.principal.sum(axis=-1)

    @property
    def gauss(self):
        return self.principal[..., 0] * self.principal[..., 1]

    @property
    def norm_sq(self):
        """Squared Frobenius norm of the shape operator."""
        return (self.principal ** 2).sum(axis=-1)


def second_form_and_shape(chart: RuledChart, s, v) -> SecondFormShape:
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    n0, n1, n2, d1, d2, w0 = _coefficient_samples(chart, s)
    det = 1.0 + d1 * v + d2 * v * v
    num = n0 + n1 * v + n2 * v * v
    sqrt_det = np.sqrt(det)
    l = num / sqrt_det
    m = w0 / sqrt_det * np.ones_like(v)
    n = np.zeros_like(l)
    shape = np.stack(
        [
            np.stack([l / det, m / det], axis=-1),
            np.stack([m, np.zeros_like(m)], axis=-1),
        ],
        axis=-2,
    )
    h = num / det ** 1.5
    k = -(w0 * w0) / (det * det) * np.ones_like(v)
    disc = np.sqrt(np.maximum(h * h - 4.0 * k, 0.0))
    principal = np.stack([(h - disc) / 2.0, (h + disc) / 2.0], axis=-1)
    return SecondFormShape(l=l, m=m, n=n, shape_operator=shape, principal=principal)


def shape_norm_sq(chart: RuledChart, s, v):
    """|shape|^2 = H^2 - 2K, squared norm of the second fundamental form."""
    n0, n1, n2, d1, d2, w0 = _coefficient_samples(chart, np.asarray(s, dtype=float))
    v = np.asarray(v, dtype=float)
    det = 1.0 + d1 * v + d2 * v * v
    num = n0 + n1 * v + n2 * v * v
    h = num / det ** 1.5
    k = -(w0 * w0) / (det * det)
    return h * h - 2.0 * k


@dataclass(frozen=True)
class DevelopabilityReport:
    developable: bool
    sup_abs_gauss: float
    sup_normal_turn: float  # sup |<ruling', normal>|
    threshold: float


def is_developable(chart: RuledChart, n_s: int = 257, n_v: int = 33,
                   tau_k: float = 1e-10, v_hi: float | None = None) -> DevelopabilityReport:
    """Developability test: the normal must be constant along rulings."""
    s = chart.s_samples(n_s)
    v = chart.v_samples(n_v, v_hi=v_hi)
    S, V = np.meshgrid(s, v, indexing="ij")
    n0, n1, n2, d1, d2, w0 = _coefficient_samples(chart, s)
    det = 1.0 + d1[:, None] * V + d2[:, None] * V * V
    k = -(w0[:, None] ** 2) / (det * det)
    turn = np.abs(w0[:, None]) / np.sqrt(det)
    scale = max(1.0, float(np.max(d2)))
    thr = tau_k * scale
    sup_k = float(np.max(np.abs(k)))
    return DevelopabilityReport(
        developable=bool(sup_k <= thr),
        sup_abs_gauss=sup_k,
        sup_normal_turn=float(np.max(turn)),
        threshold=thr,
    )


def metric_terms_from_samples(samples, v) -> dict:
    """Metric/shape data from precomputed coefficient samples.

    ``samples`` is the (n0, n1, n2, d1, d2, w0) tuple returned by
    coefficient sampling at fixed s; assembly loops reuse it across many
    v values so the curves are only evaluated once per s grid.
    """
    n0, n1, n2, d1, d2, w0 = samples
    v = np.asarray(v, dtype=float)
    det = 1.0 + d1 * v + d2 * v * v
    num = n0 + n1 * v + n2 * v * v
    sqrt_det = np.sqrt(det)
    l = num / sqrt_det
    m = (w0 / sqrt_det) * np.ones_like(v)
    h = num / det ** 1.5
    k = -(w0 * w0) / (det * det) * np.ones_like(v)
    return {"det": det, "sqrt_det": sqrt_det, "l": l, "m": m, "mean": h, "gauss": k}


def metric_terms(chart: RuledChart, s, v) -> dict:
    """Vectorized metric/shape data needed by layer quadrature and assembly.

    Returns first-form determinant, sqrt(det), second-form entries l, m,
    mean and Gauss curvature, all broadcast over (s, v).
    """
    s = np.asarray(s, dtype=float)
    return metric_terms_from_samples(_coefficient_samples(chart, s), v)


# ---------------------------------------------------------------------------
# Gauge normalization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartReparam:
    """Bookkeeping for the gauge normalization of a raw ruled chart.

    v_map(s, v) gives the gauge ruling parameter of the raw point
    directrix(s) + v*ruling(s); arclength/s_of_arclength convert between raw
    s and the gauge arclength parameter.
    """

    shift: Callable
    ruling_scale: Callable
    arclength: Callable
    s_of_arclength: Callable
    holonomy: float
    identity: bool = False

    def v_map(self, s, v):
        return np.asarray(v, dtype=float) * self.ruling_scale(s) + self.shift(s)


def _identity_reparam() -> ChartReparam:
    one = lambda s: np.ones(np.shape(s))
    zero = lambda s: np.zeros(np.shape(s))
    ident = lambda s: np.asarray(s, dtype=float)
    return ChartReparam(shift=zero, ruling_scale=one, arclength=ident,
                        s_of_arclength=ident, holonomy=0.0, identity=True)


def orthonormalize_chart(directrix: Curve, ruling: Curve,
                         s_range: tuple[float, float],
                         v_range: tuple[float, float],
                         periodic: bool = False,
                         orientation: int = 1,
                         n_samples: int = 2048,
                         gauge_tol: float = GAUGE_TOL,
                         label: str = "chart") -> tuple[RuledChart, ChartReparam]:
    """Bring a raw ruled chart to gauge.

    Normalizes the ruling field, shifts the directrix along the rulings so it
    meets them orthogonally, and reparametrizes it by arclength. The image of
    the chart is unchanged; the returned v_range is the largest window valid
    for every s (it may shrink). Raises DegenerateChart when the shifted
    directrix loses speed or when a periodic chart has ruling holonomy (the
    orthogonal shift does not close up; pass an s-sector instead).
    """
    candidate = RuledChart(directrix, ruling, s_range, v_range,
                           periodic=periodic, orientation=orientation, label=label)
    res = gauge_residuals(candidate, n=min(n_samples, 1024))
    if max(res.values()) <= gauge_tol:
        return candidate, _identity_reparam()

    lo, hi = float(s_range[0]), float(s_range[1])
    for attempt in range(2):
        n = n_samples * (2 ** attempt)
        s = np.linspace(lo, hi, n + 1)

        e_raw = ruling(s)
        e_norm = np.linalg.norm(e_raw, axis=-1)
        if np.min(e_norm) < 1e-12:
            raise DegenerateChart("ruling field vanishes on the chart")
        e_hat = e_raw / e_norm[:, None]

        # Shift the directrix along rulings to restore orthogonality:
        # t'(s) = -<directrix'(s), unit ruling(s)>.
        b1 = directrix.deriv(s)
        g = _dot(b1, e_hat)
        g_spl = CubicSpline(s, g)
        t = -g_spl.antiderivative()(s)
        holonomy = float(t[-1] - t[0]) if periodic else 0.0
        if periodic and abs(holonomy) > 1e-9 * max(1.0, hi - lo):
            raise DegenerateChart(
                "periodic chart has ruling holonomy; the orthogonal directrix "
                "does not close up. Re-run on an s-sector with periodic=False."
            )

        # not-a-knot, not natural: the speed samples feed the arclength
        # map and must match the true curve derivative at the ends too.
        bc = "periodic" if periodic else "not-a-knot"
        if periodic:
            e_hat[-1] = e_hat[0]
        e_spl = CubicSpline(s, e_hat, axis=0, bc_type=bc)
        gamma = directrix(s) + t[:, None] * e_hat
        # gamma' = directrix' + t' e + t e'; t' = -g
        dgamma = b1 - g[:, None] * e_hat + t[:, None] * e_spl.derivative()(s)
        speed = np.linalg.norm(dgamma, axis=-1)
        if np.min(speed) < 1e-10 * max(1.0, float(np.median(speed))):
            raise DegenerateChart("shifted directrix loses speed (singular locus)")

        speed_spl = CubicSpline(s, speed)
        arc = speed_spl.antiderivative()
        sigma = arc(s)
        total = float(sigma[-1])
        s_of_sig = PchipInterpolator(sigma, s)
        sig_of_s = PchipInterpolator(s, sigma)

        sig_grid = np.linspace(0.0, total, n + 1)
        # pchip inversion is only O(h^2); polish arc(s_new) = sig to
        # machine precision so the fitted curve is truly unit speed.
        s_new = s_of_sig(sig_grid)
        for _ in range(3):
            s_new = np.clip(s_new - (arc(s_new) - sig_grid) / speed_spl(s_new),
                            lo, hi)
        s_new[0], s_new[-1] = lo, hi
        gamma_new = directrix(s_new) + (-g_spl.antiderivative()(s_new))[:, None] * (
            ruling(s_new) / np.linalg.norm(ruling(s_new), axis=-1)[:, None]
        )
        e_new = ruling(s_new) / np.linalg.norm(ruling(s_new), axis=-1)[:, None]
        if periodic:
            gamma_new[-1] = gamma_new[0]
            e_new[-1] = e_new[0]
        new_directrix = Curve.from_spline(sig_grid, gamma_new, periodic=periodic,
                                          label=f"{label}-directrix")
        new_ruling = Curve.from_spline(sig_grid, e_new, periodic=periodic,
                                       label=f"{label}-ruling")

        # Valid-for-all-s gauge window: v_new = v * |ruling| - t
        v_lo_all = v_range[0] * e_norm - t
        v_hi_all = v_range[1] * e_norm - t
        new_v = (float(np.max(v_lo_all)), float(np.min(v_hi_all)))
        if not new_v[0] < new_v[1]:
            raise DegenerateChart(
                "gauge shift exceeds the declared ruling window; enlarge v_range"
            )

        chart = RuledChart(new_directrix, new_ruling, (0.0, total), new_v,
                           periodic=periodic, orientation=orientation, label=label)
        worst = max(gauge_residuals(chart, n=min(n, 1024)).values())
        if worst <= gauge_tol:
            # v_map = v*|ruling| - t with t = -antiderivative(g), so the
            # additive term is +antiderivative(g).
            shift_fn = lambda q: g_spl.antiderivative()(np.asarray(q, dtype=float))
            scale_fn = lambda q: np.linalg.norm(ruling(np.asarray(q, dtype=float)), axis=-1)
            reparam = ChartReparam(
                shift=shift_fn, ruling_scale=scale_fn,
                arclength=lambda q: sig_of_s(np.asarray(q, dtype=float)),
                s_of_arclength=lambda q: s_of_sig(np.asarray(q, dtype=float)),
                holonomy=holonomy,
            )
            return chart, reparam

    raise DegenerateChart(
        f"gauge normalization stalled at residual {worst:.3e} > {gauge_tol:.1e}"
    )
