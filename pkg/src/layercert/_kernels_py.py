"""Pure-numpy assembly kernel: per-element 8x8 local matrices.

Same contract as the compiled twin in _kernels.pyx: given per-element,
per-quadrature-point coefficient arrays (already scaled by jacobians and
inverse element widths) and the reference basis tables, return the local
stiffness and mass blocks for every element.
"""

from __future__ import annotations

import numpy as np


def local_matrices(css, csv, cvv, cuu, cm, n_tab, ds_tab, dv_tab, du_tab):
    """(E,Q) coefficients x (8,Q) reference tables -> ((E,8,8), (E,8,8)).

    stiff[e,i,j] = sum_q css*ds_i ds_j + csv*(ds_i dv_j + dv_i ds_j)
                         + cvv*dv_i dv_j + cuu*du_i du_j
    mass[e,i,j]  = sum_q cm*n_i n_j
    """
    a_ss = np.einsum("lq,mq->lmq", ds_tab, ds_tab)
    a_sv = (np.einsum("lq,mq->lmq", ds_tab, dv_tab)
            + np.einsum("lq,mq->lmq", dv_tab, ds_tab))
    a_vv = np.einsum("lq,mq->lmq", dv_tab, dv_tab)
    a_uu = np.einsum("lq,mq->lmq", du_tab, du_tab)
    a_m = np.einsum("lq,mq->lmq", n_tab, n_tab)
    stiff = (np.einsum("eq,lmq->elm", css, a_ss)
             + np.einsum("eq,lmq->elm", csv, a_sv)
             + np.einsum("eq,lmq->elm", cvv, a_vv)
             + np.einsum("eq,lmq->elm", cuu, a_uu))
    mass = np.einsum("eq,lmq->elm", cm, a_m)
    return stiff, mass
