"""Assembly kernels: compiled/python twins must agree bit-for-bit-ish."""

import os
import subprocess
import sys

import numpy as np

from layercert import _kernels_py
from layercert.kernels import (
    BACKEND,
    REF_DS,
    REF_DU,
    REF_DV,
    REF_N,
    local_matrices,
)


def test_reference_tables_partition_of_unity():
    # Q1 shapes sum to one at every quadrature point, derivatives to zero
    assert np.allclose(REF_N.sum(axis=0), 1.0, atol=1e-15)
    for tab in (REF_DS, REF_DV, REF_DU):
        assert np.allclose(tab.sum(axis=0), 0.0, atol=1e-15)
    assert REF_N.shape == (8, 8)


def test_local_matrices_symmetry():
    rng = np.random.default_rng(3)
    coeffs = [rng.uniform(0.1, 2.0, (5, 8)) for _ in range(5)]
    stiff, mass = local_matrices(*coeffs)
    assert stiff.shape == (5, 8, 8)
    assert np.allclose(stiff, np.swapaxes(stiff, 1, 2), atol=1e-14)
    assert np.allclose(mass, np.swapaxes(mass, 1, 2), atol=1e-14)


def test_constant_coefficient_element_volume():
    # with unit coefficients the mass block sums to the reference volume 8
    one = np.ones((1, 8))
    zero = np.zeros((1, 8))
    _, mass = local_matrices(zero, zero, zero, zero, one)
    assert abs(mass.sum() - 8.0) <= 1e-13
    # and a constant function is in the kernel of the stiffness block
    stiff, _ = local_matrices(one, one, one, one, one)
    assert np.allclose(stiff.sum(axis=2), 0.0, atol=1e-13)


def test_backends_agree():
    rng = np.random.default_rng(17)
    coeffs = [rng.standard_normal((40, 8)) for _ in range(5)]
    s_active, m_active = local_matrices(*coeffs)
    s_py, m_py = _kernels_py.local_matrices(
        *[np.ascontiguousarray(c) for c in coeffs],
        REF_N, REF_DS, REF_DV, REF_DU)
    scale = max(1.0, float(np.max(np.abs(s_py))))
    assert np.max(np.abs(s_active - s_py)) <= 1e-13 * scale
    assert np.max(np.abs(m_active - m_py)) <= 1e-13 * scale


def test_force_python_env_switch():
    code = ("import layercert.kernels as k; print(k.backend_name())")
    env = dict(os.environ, LAYERCERT_FORCE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_compiled_backend_is_active_here():
    # the build in this tree ships the extension; a silent fallback would
    # invalidate the benchmark numbers
    if os.environ.get("LAYERCERT_FORCE_PYTHON") == "1":
        assert BACKEND == "python"
    else:
        assert BACKEND == "compiled"
