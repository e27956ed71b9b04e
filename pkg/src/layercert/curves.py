"""Space curves bundled with their first two derivatives.

Closed-form catalog curves wrap exact callables; user curves come in as
samples (or CSV files with columns s, x, y, z) and are represented by cubic
splines, whose derivatives are used directly.
"""

from __future__ import annotations

import io
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline


def _as_points(s, out):
    out = np.asarray(out, dtype=float)
    if np.isscalar(s) or np.ndim(s) == 0:
        return out.reshape(3)
    return out.reshape(np.shape(s) + (3,))


class Curve:
    """A curve s -> R^3 with evaluators for position and two derivatives.

    All evaluators are vectorized: scalar s gives shape (3,), an array of
    shape (n,) gives (n, 3).
    """

    def __init__(self, fn: Callable, d1: Callable, d2: Callable, label: str = "curve"):
        self._fn = fn
        self._d1 = d1
        self._d2 = d2
        self.label = label

    def __call__(self, s):
        return _as_points(s, self._fn(np.asarray(s, dtype=float)))

    def deriv(self, s):
        return _as_points(s, self._d1(np.asarray(s, dtype=float)))

    def second(self, s):
        return _as_points(s, self._d2(np.asarray(s, dtype=float)))

    def __repr__(self):
        return f"Curve({self.label})"

    @classmethod
    def from_spline(cls, s_samples, points, periodic: bool = False, label: str = "spline"):
        """Interpolating cubic-spline curve through (s_samples, points)."""
        s_samples = np.asarray(s_samples, dtype=float)
        points = np.asarray(points, dtype=float)
        if points.shape != (s_samples.size, 3):
            raise ValueError("points must have shape (len(s_samples), 3)")
        if s_samples.size < 4:
            raise ValueError("need at least 4 samples for a cubic spline curve")
        if np.any(np.diff(s_samples) <= 0):
            raise ValueError("s_samples must be strictly increasing")
        # natural BCs force f''=0 at the ends and cost two orders of
        # boundary accuracy; not-a-knot keeps the full O(h^4) rate.
        bc = "periodic" if periodic else "not-a-knot"
        if periodic and not np.allclose(points[0], points[-1], atol=1e-12):
            raise ValueError("periodic curve samples must close up (first == last)")
        spl = CubicSpline(s_samples, points, axis=0, bc_type=bc)
        d1 = spl.derivative(1)
        d2 = spl.derivative(2)
        c = cls(spl, d1, d2, label=label)
        c.s_samples = s_samples
        return c

    @classmethod
    def from_csv(cls, path_or_buf, periodic: bool = False, label: str | None = None):
        """Load a sampled curve from CSV with columns s, x, y, z.

        A single header line is allowed and detected by a non-numeric first
        field. Delimiter is comma.
        """
        if isinstance(path_or_buf, (str, bytes)):
            with open(path_or_buf, "r", encoding="utf-8") as fh:
                text = fh.read()
            if label is None:
                label = str(path_or_buf)
        else:
            text = path_or_buf.read()
            if label is None:
                label = "csv-curve"
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty curve CSV")
        first_data = 0
        try:
            float(lines[0].split(",")[0])
        except ValueError:
            first_data = 1
        data = np.loadtxt(io.StringIO("\n".join(lines[first_data:])), delimiter=",", ndmin=2)
        if data.shape[1] != 4:
            raise ValueError("curve CSV must have exactly 4 columns: s, x, y, z")
        return cls.from_spline(data[:, 0], data[:, 1:4], periodic=periodic, label=label)


def circle_curve(radius: float, z: float = 0.0, label: str | None = None) -> Curve:
    """Unit-speed circle of given radius in the plane at height z."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    r = float(radius)

    def fn(s):
        t = s / r
        return np.stack([r * np.cos(t), r * np.sin(t), np.full_like(t, z)], axis=-1)

    def d1(s):
        t = s / r
        return np.stack([-np.sin(t), np.cos(t), np.zeros_like(t)], axis=-1)

    def d2(s):
        t = s / r
        return np.stack([-np.cos(t) / r, -np.sin(t) / r, np.zeros_like(t)], axis=-1)

    return Curve(fn, d1, d2, label=label or f"circle(r={r})")


def line_curve(point, direction, label: str = "line") -> Curve:
    """Unit-speed straight line through `point` along `direction`."""
    p0 = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    nrm = np.linalg.norm(d)
    if nrm == 0:
        raise ValueError("direction must be nonzero")
    d = d / nrm

    def fn(s):
        return p0 + np.multiply.outer(s, d)

    def d1(s):
        return np.broadcast_to(d, np.shape(s) + (3,)).copy()

    def d2(s):
        return np.zeros(np.shape(s) + (3,))

    return Curve(fn, d1, d2, label=label)


def constant_direction(direction, label: str = "const-dir") -> Curve:
    """Constant unit vector field, as a degenerate 'curve' evaluator."""
    d = np.asarray(direction, dtype=float)
    nrm = np.linalg.norm(d)
    if nrm == 0:
        raise ValueError("direction must be nonzero")
    d = d / nrm

    def fn(s):
        return np.broadcast_to(d, np.shape(s) + (3,)).copy()

    def zero(s):
        return np.zeros(np.shape(s) + (3,))

    return Curve(fn, zero, zero, label=label)
