"""Assembly kernel backend selection and the shared Q1 reference tables.

The compiled extension (_kernels, built from _kernels.pyx) is preferred;
the numpy twin (_kernels_py) is used when the extension is missing or when
LAYERCERT_FORCE_PYTHON=1 is set. Both implement the same local-matrix
contraction; tests compare them directly.

Local node order: l = 4*ds + 2*dv + du over corner offsets (ds, dv, du) in
{0, 1}^3. Quadrature: tensor 2-point Gauss, q = 4*qs + 2*qv + qu.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("LAYERCERT_FORCE_PYTHON") == "1":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"


def backend_name() -> str:
    return BACKEND


def _reference_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Q1 values and reference derivatives at the 2x2x2 Gauss points.

    Returns (n, ds, dv, du), each (8 nodes, 8 points), derivatives taken in
    reference coordinates on [-1, 1]^3 (physical scaling is folded into the
    coefficient arrays by the assembler).
    """
    g = 1.0 / np.sqrt(3.0)
    pts = np.array([-g, g])

    def shape(d, x):
        return 0.5 * (1.0 + (2.0 * d - 1.0) * x)

    def dshape(d):
        return 0.5 * (2.0 * d - 1.0)

    n = np.empty((8, 8))
    ds = np.empty((8, 8))
    dv = np.empty((8, 8))
    du = np.empty((8, 8))
    for l in range(8):
        cs, cv, cu = (l >> 2) & 1, (l >> 1) & 1, l & 1
        for q in range(8):
            xs, xv, xu = pts[(q >> 2) & 1], pts[(q >> 1) & 1], pts[q & 1]
            n[l, q] = shape(cs, xs) * shape(cv, xv) * shape(cu, xu)
            ds[l, q] = dshape(cs) * shape(cv, xv) * shape(cu, xu)
            dv[l, q] = shape(cs, xs) * dshape(cv) * shape(cu, xu)
            du[l, q] = shape(cs, xs) * shape(cv, xv) * dshape(cu)
    return n, ds, dv, du


REF_N, REF_DS, REF_DV, REF_DU = _reference_tables()


def local_matrices(css, csv, cvv, cuu, cm):
    """Dispatch the (E,Q)-coefficient contraction to the active backend."""
    args = []
    for x in (css, csv, cvv, cuu, cm):
        arr = np.ascontiguousarray(x, dtype=np.float64)
        if not arr.flags.writeable:
            # broadcast views arrive read-only; the compiled memoryviews
            # insist on writable buffers
            arr = arr.copy()
        args.append(arr)
    return _impl.local_matrices(*args, REF_N, REF_DS, REF_DV, REF_DU)
