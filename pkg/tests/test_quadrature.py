"""Panel Gauss quadrature: exactness, breaks, log grading, failure modes."""

import numpy as np
import pytest

from layercert import Axis, integrate, integrate_fixed, radial_integral
from layercert.errors import QuadratureFailure


def test_polynomial_exactness():
    # order-12 Gauss is exact through degree 23 on each panel
    ax = Axis(-1.0, 2.0, panels=2, order=12)
    for k in (0, 3, 10, 23):
        exact = (2.0 ** (k + 1) - (-1.0) ** (k + 1)) / (k + 1)
        res = integrate(lambda x: x ** k, [ax], target_rel=1e-13)
        assert abs(res.value - exact) <= 1e-12 * max(1.0, abs(exact))


def test_smooth_1d():
    res = integrate(lambda x: np.sin(x), [Axis(0.0, np.pi)])
    assert abs(res.value - 2.0) <= 1e-12
    assert res.error <= 1e-10


def test_tensor_2d():
    # int x^2 dx on (0,1) * int y^3 dy on (0,2) = (1/3)*(4)
    res = integrate(lambda x, y: x * x * y ** 3,
                    [Axis(0.0, 1.0), Axis(0.0, 2.0)])
    assert abs(res.value - 4.0 / 3.0) <= 1e-12


def test_kink_needs_break():
    f = lambda x: np.abs(x - 0.3)
    exact = (0.3 ** 2 + 0.7 ** 2) / 2.0
    with_break = integrate(f, [Axis(0.0, 1.0, breaks=(0.3,))],
                           target_rel=1e-12)
    assert abs(with_break.value - exact) <= 1e-13


def test_log_axis_wide_range():
    res = integrate(lambda x: 1.0 / x, [Axis(1.0, 1e6, log=True)])
    assert abs(res.value - np.log(1e6)) <= 1e-9 * np.log(1e6)


def test_log_axis_requires_positive_lo():
    with pytest.raises(ValueError):
        Axis(0.0, 1.0, log=True)


def test_break_outside_range_rejected():
    with pytest.raises(ValueError):
        Axis(0.0, 1.0, breaks=(2.0,))


def test_empty_axis_rejected():
    with pytest.raises(ValueError):
        Axis(1.0, 1.0)


def test_radial_integral_long_tail():
    # int_0^R r exp(-r) dr -> 1 for large R, graded tail handles 6 decades
    res = radial_integral(lambda r: r * np.exp(-r), 0.0, 1e6)
    assert abs(res.value - 1.0) <= 1e-10


def test_radial_integral_honors_breaks():
    f = lambda r: np.where(r < 2.0, 1.0, 0.0)
    res = radial_integral(f, 0.0, 5.0, breaks=(2.0,))
    assert abs(res.value - 2.0) <= 1e-12


def test_failure_reported():
    # integrable but rough at 0: uniform panels cannot settle to 1e-13
    with pytest.raises(QuadratureFailure):
        integrate(lambda x: 1.0 / np.sqrt(np.abs(x) + 1e-300),
                  [Axis(0.0, 1.0)], target_rel=1e-13, target_abs=1e-15,
                  max_refine=2)


def test_integrate_fixed_never_raises():
    res = integrate_fixed(lambda x: 1.0 / np.sqrt(np.abs(x) + 1e-300),
                          [Axis(0.0, 1.0)], refine=1)
    assert np.isfinite(res.value)
    assert res.error > 0.0


def test_determinism():
    f = lambda x, y: np.exp(-x * x - 0.5 * y * y) * np.cos(3 * x + y)
    axes = [Axis(-2.0, 2.0), Axis(-3.0, 3.0)]
    a = integrate(f, axes)
    b = integrate(f, axes)
    assert a.value == b.value
    assert a.error == b.error
