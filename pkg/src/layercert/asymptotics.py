"""Growth dichotomies of the ruling-polynomial coefficients.

The mean-curvature numerator and the first-form determinant are quadratic
polynomials in the ruling parameter v. Their degrees decide, for windows far
out along the rulings, whether the windowed coupling integral of the mean
curvature grows linearly/quadratically in the window length or stays
sublinear, and whether the squared mean curvature is integrable. This module
classifies the degrees from samples, evaluates the window integrals, fits the
growth, and cross-checks fit against prediction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charts import CoefficientProfile
from .errors import InconclusiveFit, UnstableWindow
from .quadrature import Axis, integrate

DEG_TOL = 1e-9
FIT_TOL = 0.05
EXPONENT_BAND = 0.25
TAIL_TOL = 1e-3
DEG_NONE = float("-inf")  # marks an identically vanishing numerator


@dataclass(frozen=True)
class DegreeProfile:
    """Degrees in v of the shape numerator and first-form determinant."""

    deg_num: float  # element of {-inf, 0, 1, 2}
    deg_det: int  # 0 or 2
    stable: bool
    stable_window: tuple[float, float]
    stable_fraction: float
    tau: float
    scale: float
    per_sample: np.ndarray = field(repr=False)  # (n, 2) ints, -1 encodes -inf

    @property
    def sublinear_predicted(self) -> bool:
        return self.deg_num < self.deg_det

    def predicted_growth(self) -> tuple[str, int | None]:
        """Window-integral growth implied by the degrees: (label, poly degree)."""
        if self.deg_num == DEG_NONE or self.deg_num < self.deg_det:
            return "sublinear", None
        n = int(self.deg_num - self.deg_det) + 1
        if n not in (1, 2):
            raise InconclusiveFit(
                f"degree pair ({self.deg_num:g}, {self.deg_det}) admits no "
                "polynomial growth case")
        return "polynomial", n


def classify_degrees(profile: CoefficientProfile,
                     s_window: tuple[float, float],
                     n_s: int = 129, tau: float = DEG_TOL,
                     w_min_fraction: float = 0.25) -> DegreeProfile:
    """Assign (deg_num, deg_det) from coefficient samples on the s-window.

    A coefficient sample counts as zero iff its magnitude is at most tau
    times the largest coefficient magnitude over the whole window (one
    common scale, so finite-difference noise in one coefficient cannot
    promote another's structural zero). If the degree pair varies across
    the window, the longest constant run is kept when it covers at least
    w_min_fraction of the window; otherwise UnstableWindow.
    """
    s = np.linspace(s_window[0], s_window[1], n_s)
    arrays = profile.coefficient_arrays(s)
    scale = max(float(np.max(np.abs(a))) for a in arrays)
    if scale == 0.0:
        scale = 1.0
    n0, n1, n2, d1, d2 = (np.abs(np.asarray(a)) > tau * scale for a in arrays)

    deg_num = np.where(n2, 2, np.where(n1, 1, np.where(n0, 0, -1)))
    deg_det = np.where(d2, 2, 0)
    pairs = np.stack([deg_num, deg_det], axis=1)

    # longest run of a constant degree pair
    changes = np.any(pairs[1:] != pairs[:-1], axis=1)
    run_starts = np.concatenate([[0], np.nonzero(changes)[0] + 1])
    run_ends = np.concatenate([np.nonzero(changes)[0] + 1, [n_s]])
    lengths = run_ends - run_starts
    best = int(np.argmax(lengths))
    frac = lengths[best] / n_s
    stable = bool(lengths[best] == n_s)
    if not stable and frac < w_min_fraction:
        raise UnstableWindow(
            f"degrees vary over the window; longest stable run covers only "
            f"{frac:.1%} (< {w_min_fraction:.0%})")
    lo = float(s[run_starts[best]])
    hi = float(s[run_ends[best] - 1])
    dn = float(pairs[run_starts[best], 0])
    if dn < 0:
        dn = DEG_NONE
    return DegreeProfile(
        deg_num=dn, deg_det=int(pairs[run_starts[best], 1]),
        stable=stable, stable_window=(lo, hi), stable_fraction=float(frac),
        tau=tau, scale=scale, per_sample=pairs,
    )


def sector_integral_mean(profile: CoefficientProfile,
                         s_window: tuple[float, float],
                         t: float, t0: float,
                         target_rel: float = 1e-10):
    """Windowed coupling integral of the mean curvature.

    Integrates shape_numerator/first_form_det over s_window x [t, t+t0];
    that product equals mean curvature times the area density.
    """
    axes = [Axis(s_window[0], s_window[1]),
            Axis(t, t + t0, log=(t > 0 and t0 > 100 * max(t, 1.0)))]
    return integrate(lambda s, v: profile.ratio(s, v), axes,
                     target_rel=target_rel, target_abs=1e-14)


@dataclass(frozen=True)
class GrowthVerdict:
    classification: str  # "sublinear" or "polynomial"
    degree: int | None  # 1 or 2 when polynomial
    exponent: float
    residual: float
    predicted: str
    predicted_degree: int | None
    degrees: tuple[float, int]
    t0_grid: tuple
    values: tuple
    agrees: bool


def growth_classification(profile: CoefficientProfile,
                          s_window: tuple[float, float],
                          t: float, t0_grid=None,
                          fit_tol: float = FIT_TOL,
                          band: float = EXPONENT_BAND) -> GrowthVerdict:
    """Fit the growth of the windowed mean-curvature integral in t0.

    Evaluates the sector integral on a doubling grid of window lengths and
    runs a log-log least-squares fit on the last four rungs, where the
    leading behavior dominates. The fitted class must agree with the
    degree-based prediction, else InconclusiveFit.
    """
    degrees = classify_degrees(profile, s_window)
    if t0_grid is None:
        t0_grid = [t * 2 ** k for k in range(8)]
    t0_grid = [float(x) for x in t0_grid]
    values = [sector_integral_mean(profile, s_window, t, t0).value
              for t0 in t0_grid]
    predicted, pred_degree = degrees.predicted_growth()

    mags = np.abs(np.asarray(values))
    floor = 1e-13 * (1.0 + max(degrees.scale, 1.0) * max(t0_grid) ** 3)
    if np.all(mags <= floor):
        verdict = GrowthVerdict(
            classification="sublinear", degree=None, exponent=0.0,
            residual=0.0, predicted=predicted, predicted_degree=pred_degree,
            degrees=(degrees.deg_num, degrees.deg_det),
            t0_grid=tuple(t0_grid), values=tuple(values),
            agrees=(predicted == "sublinear"))
        if not verdict.agrees:
            raise InconclusiveFit("vanishing integrals but polynomial growth predicted")
        return verdict

    tail = slice(len(t0_grid) - 4, len(t0_grid))
    x = np.log(np.asarray(t0_grid[tail]))
    y = np.log(np.maximum(mags[tail], floor))
    coef = np.polyfit(x, y, 1)
    exponent = float(coef[0])
    residual = float(np.sqrt(np.mean((np.polyval(coef, x) - y) ** 2)))

    if exponent <= 0.5:
        classification, degree = "sublinear", None
    else:
        n = int(round(exponent))
        if n in (1, 2) and abs(exponent - n) <= band and residual <= fit_tol:
            classification, degree = "polynomial", n
        else:
            raise InconclusiveFit(
                f"exponent {exponent:.3f} (residual {residual:.3f}) matches "
                "no growth case")
    if classification == "polynomial" and residual > fit_tol:
        raise InconclusiveFit(
            f"log-log residual {residual:.3f} exceeds {fit_tol}")

    agrees = (classification == predicted
              and (classification != "polynomial" or degree == pred_degree))
    if not agrees:
        raise InconclusiveFit(
            f"fitted {classification}(n={degree}) but degrees "
            f"({degrees.deg_num:g},{degrees.deg_det}) predict "
            f"{predicted}(n={pred_degree}); enlarge t")
    return GrowthVerdict(
        classification=classification, degree=degree, exponent=exponent,
        residual=residual, predicted=predicted, predicted_degree=pred_degree,
        degrees=(degrees.deg_num, degrees.deg_det),
        t0_grid=tuple(t0_grid), values=tuple(values), agrees=True)


@dataclass(frozen=True)
class IntegrabilityReport:
    verdict: str  # "convergent" or "divergent"
    rate: str  # "tail_cauchy", "log", or "polynomial"
    values: tuple
    v_grid: tuple
    predicted_convergent: bool
    agrees: bool


def h2_integrability(profile: CoefficientProfile,
                     s_window: tuple[float, float],
                     v_grid=None, v_lo: float = 0.0,
                     tail_tol: float = TAIL_TOL) -> IntegrabilityReport:
    """Truncation test for the integral of squared mean curvature.

    Integrand: shape_numerator^2 / first_form_det^{5/2} (the squared mean
    curvature times the area density). Convergent iff the truncations at the
    geometric v-grid are Cauchy; a divergent verdict is labeled "log" when
    the truncations fit c0 + c1*log(V) on the last rungs, else "polynomial".
    """
    degrees = classify_degrees(profile, s_window)
    if v_grid is None:
        base = max(1.0, 2.0 * abs(v_lo))
        v_grid = [base * 2.0 ** k for k in range(2, 11)]
    v_grid = [float(v) for v in v_grid]

    def integrand(s, v):
        num = profile.shape_numerator(s, v)
        det = profile.first_form_det(s, v)
        return num * num / det ** 2.5

    values = []
    for v_hi in v_grid:
        # geometric interior breaks keep uniform panels from drowning the
        # near edge when the range spans many decades (integrands ~ 1/v)
        marks = []
        b = 8.0 * max(1.0, v_lo)
        while b < v_hi / 4.0:
            marks.append(b)
            b *= 8.0
        axes = [Axis(s_window[0], s_window[1]),
                Axis(v_lo, v_hi, breaks=tuple(marks))]
        values.append(integrate(integrand, axes, target_rel=1e-9,
                                target_abs=1e-14).value)
    vals = np.asarray(values)
    increments = np.diff(vals)

    scale = max(1.0, float(np.max(np.abs(vals))))
    tail_ok = np.all(increments[-3:] <= tail_tol * scale)
    decreasing = np.all(np.diff(increments[-4:]) <= 1e-12 * scale)
    convergent = bool(tail_ok and decreasing)

    if convergent:
        rate = "tail_cauchy"
    else:
        x = np.log(np.asarray(v_grid[-4:]))
        y = vals[-4:]
        coef = np.polyfit(x, y, 1)
        res = float(np.sqrt(np.mean((np.polyval(coef, x) - y) ** 2)))
        rate = "log" if res <= 0.05 * max(1.0, abs(coef[0])) else "polynomial"

    predicted = degrees.sublinear_predicted  # deg_num < deg_det
    agrees = (convergent == predicted)
    if not agrees:
        raise InconclusiveFit(
            f"truncations look {'convergent' if convergent else 'divergent'} "
            f"but degrees ({degrees.deg_num:g},{degrees.deg_det}) predict the "
            "opposite; enlarge the v-grid")
    return IntegrabilityReport(
        verdict="convergent" if convergent else "divergent", rate=rate,
        values=tuple(values), v_grid=tuple(v_grid),
        predicted_convergent=predicted, agrees=True)


def dominance_scale(profile: CoefficientProfile,
                    s_window: tuple[float, float],
                    n_s: int = 129, t_max: float = 2.0 ** 40) -> float:
    """Smallest doubling-scan t with det(s,t) >= 0.5*max(1, d2(s) t^2) on the window.

    Concrete stand-in for "t large enough that leading terms dominate".
    """
    s = np.linspace(s_window[0], s_window[1], n_s)
    d2 = np.asarray(profile.d2(s), dtype=float)
    t = 1.0
    while t <= t_max:
        det = profile.first_form_det(s, np.full_like(s, t))
        if np.all(det >= 0.5 * np.maximum(1.0, d2 * t * t)):
            return t
        t *= 2.0
    raise InconclusiveFit("no dominance scale found within budget")
