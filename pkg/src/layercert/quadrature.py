"""Deterministic Gauss-Legendre panel quadrature with halving error bounds.

Every integral in the package that feeds a certified inequality goes through
`integrate`, which evaluates a tensor-product Gauss rule on a panel
subdivision, doubles the panel count until two successive levels agree, and
reports |I_fine - I_coarse| as the error bound. All node placement is
deterministic, so repeated runs produce byte-identical values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureFailure


@dataclass(frozen=True)
class Axis:
    """One integration axis: [lo, hi] split into panels, GL rule per panel.

    `breaks` are interior points forced onto panel boundaries (kinks of the
    integrand: cutoff ramp edges, gluing radii). `log=True` grades the panels
    geometrically, for ranges spanning many decades; requires lo > 0.
    """

    lo: float
    hi: float
    panels: int = 8
    order: int = 12
    breaks: tuple = ()
    log: bool = False

    def __post_init__(self):
        if not np.isfinite(self.lo) or not np.isfinite(self.hi):
            raise ValueError("axis endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"empty axis [{self.lo}, {self.hi}]")
        if self.log and self.lo <= 0:
            raise ValueError("log grading requires lo > 0")
        for b in self.breaks:
            if not (self.lo < b < self.hi):
                raise ValueError(f"break {b} outside ({self.lo}, {self.hi})")

    def edges(self, refine: int = 0) -> np.ndarray:
        seg = np.unique(np.concatenate(
            [[self.lo], np.asarray(self.breaks, dtype=float), [self.hi]]))
        per = self.panels * (2 ** refine)
        pieces = []
        for a, b in zip(seg[:-1], seg[1:]):
            if self.log:
                pieces.append(np.geomspace(a, b, per + 1)[:-1])
            else:
                pieces.append(np.linspace(a, b, per + 1)[:-1])
        return np.concatenate(pieces + [[seg[-1]]])

    def nodes_weights(self, refine: int = 0) -> tuple[np.ndarray, np.ndarray]:
        x, w = np.polynomial.legendre.leggauss(self.order)
        edges = self.edges(refine)
        mid = (edges[1:] + edges[:-1]) / 2.0
        half = (edges[1:] - edges[:-1]) / 2.0
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return nodes, weights


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    levels: int
    n_evals: int

    def __float__(self):
        return self.value


def integrate(f: Callable, axes: Sequence[Axis],
              target_rel: float = 1e-10, target_abs: float = 1e-12,
              max_refine: int = 4, min_refine: int = 1) -> QuadResult:
    """Tensor-product quadrature of f over the given axes.

    f is called with one meshgrid array per axis (ij indexing) and must return
    the integrand on that grid. Panels are doubled uniformly until successive
    values agree within max(target_abs, target_rel*|I|); the last gap is the
    reported error bound. Raises QuadratureFailure if the tolerance is not
    reached by max_refine doublings.
    """
    prev = None
    n_evals = 0
    for level in range(max_refine + 1):
        nw = [ax.nodes_weights(refine=level) for ax in axes]
        grids = np.meshgrid(*[n for n, _ in nw], indexing="ij")
        vals = np.asarray(f(*grids), dtype=float)
        if vals.shape != grids[0].shape:
            raise QuadratureFailure(
                f"integrand returned shape {vals.shape}, expected {grids[0].shape}")
        if not np.all(np.isfinite(vals)):
            raise QuadratureFailure("integrand returned non-finite values")
        n_evals += vals.size
        acc = vals
        for k in range(len(axes) - 1, -1, -1):
            acc = np.tensordot(acc, nw[k][1], axes=([k], [0]))
        cur = float(acc)
        if prev is not None and level >= min_refine:
            gap = abs(cur - prev)
            tol = max(target_abs, target_rel * abs(cur))
            if gap <= tol:
                return QuadResult(value=cur, error=gap, levels=level, n_evals=n_evals)
        if level < max_refine:
            prev = cur
    gap = abs(cur - prev) if prev is not None else float("inf")
    raise QuadratureFailure(
        f"quadrature did not settle: last gap {gap:.3e} after {max_refine} doublings")


def radial_integral(f: Callable, lo: float, hi: float, breaks=(),
                    target_rel: float = 1e-10, max_refine: int = 4) -> QuadResult:
    """1D integral on [lo, hi] that grades panels geometrically on long tails.

    Splits at max(lo, 1) when hi spans more than two decades beyond it, so
    integrands decaying on log scales (capacity kernels, curvature tails)
    are resolved without wasting panels. Breaks are honored per piece.
    """
    if not lo < hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    split = max(lo, 1.0)
    pieces = []
    if hi > 100.0 * max(split, 1.0) and split > lo:
        pieces.append((lo, split, False))
        pieces.append((split, hi, True))
    elif hi > 100.0 * max(split, 1.0):
        pieces.append((lo, hi, lo > 0))
    else:
        pieces.append((lo, hi, False))
    total, err, evals, levels = 0.0, 0.0, 0, 0
    for a, b, use_log in pieces:
        inner = tuple(x for x in breaks if a < x < b)
        res = integrate(lambda r: f(r), [Axis(a, b, breaks=inner, log=use_log)],
                        target_rel=target_rel, target_abs=1e-14,
                        max_refine=max_refine)
        total += res.value
        err += res.error
        evals += res.n_evals
        levels = max(levels, res.levels)
    return QuadResult(value=total, error=err, levels=levels, n_evals=evals)


def integrate_fixed(f: Callable, axes: Sequence[Axis], refine: int = 1) -> QuadResult:
    """Single-level tensor quadrature with the halving gap as error bound.

    Evaluates at `refine-1` and `refine` panel levels; returns the fine value.
    Never raises on large gaps; callers fold the bound into their margins.
    """
    values = []
    n_evals = 0
    for level in (max(refine - 1, 0), refine):
        nw = [ax.nodes_weights(refine=level) for ax in axes]
        grids = np.meshgrid(*[n for n, _ in nw], indexing="ij")
        vals = np.asarray(f(*grids), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise QuadratureFailure("integrand returned non-finite values")
        n_evals += vals.size
        acc = vals
        for k in range(len(axes) - 1, -1, -1):
            acc = np.tensordot(acc, nw[k][1], axes=([k], [0]))
        values.append(float(acc))
    return QuadResult(value=values[-1], error=abs(values[-1] - values[0]),
                      levels=refine, n_evals=n_evals)
