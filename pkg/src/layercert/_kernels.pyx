# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled assembly kernel: per-element 8x8 local matrices.

Numerically equivalent to _kernels_py.local_matrices (same contraction,
loop order may differ in the last bits). Built optionally; the package
falls back to the numpy twin when the extension is absent.
"""

import numpy as np


def local_matrices(double[:, ::1] css, double[:, ::1] csv,
                   double[:, ::1] cvv, double[:, ::1] cuu,
                   double[:, ::1] cm,
                   double[:, ::1] n_tab, double[:, ::1] ds_tab,
                   double[:, ::1] dv_tab, double[:, ::1] du_tab):
    cdef Py_ssize_t n_elem = css.shape[0]
    cdef Py_ssize_t n_q = css.shape[1]
    stiff_arr = np.empty((n_elem, 8, 8), dtype=np.float64)
    mass_arr = np.empty((n_elem, 8, 8), dtype=np.float64)
    cdef double[:, :, ::1] stiff = stiff_arr
    cdef double[:, :, ::1] mass = mass_arr
    cdef Py_ssize_t e, i, j, q
    cdef double acc, accm
    with nogil:
        for e in range(n_elem):
            for i in range(8):
                for j in range(8):
                    acc = 0.0
                    accm = 0.0
                    for q in range(n_q):
                        acc += (css[e, q] * ds_tab[i, q] * ds_tab[j, q]
                                + csv[e, q] * (ds_tab[i, q] * dv_tab[j, q]
                                               + dv_tab[i, q] * ds_tab[j, q])
                                + cvv[e, q] * dv_tab[i, q] * dv_tab[j, q]
                                + cuu[e, q] * du_tab[i, q] * du_tab[j, q])
                        accm += cm[e, q] * n_tab[i, q] * n_tab[j, q]
                    stiff[e, i, j] = acc
                    mass[e, i, j] = accm
    return stiff_arr, mass_arr
