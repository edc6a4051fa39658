# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo polymer DP kernel (hot loop of mc_laplace).

Contract mirrors grsklab._mc_numpy.mc_chunk; selected at import time by
grsklab.sampling when the extension built successfully.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def mc_chunk(cnp.ndarray[cnp.float64_t, ndim=3] w, points, us):
    cdef Py_ssize_t S = w.shape[0]
    cdef Py_ssize_t M = w.shape[1]
    cdef Py_ssize_t N = w.shape[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(S)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] pts = np.asarray(
        [[p[0], p[1]] for p in points], dtype=np.int64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] uu = np.asarray(us, dtype=np.float64)
    cdef Py_ssize_t npts = pts.shape[0]
    cdef Py_ssize_t s, i, j, k
    cdef double expo, prev
    # DP scratch with a zero border row/column
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Z = np.zeros((M + 1, N + 1))
    for s in range(S):
        for i in range(1, M + 1):
            for j in range(1, N + 1):
                prev = Z[i - 1, j] + Z[i, j - 1]
                if i == 1 and j == 1:
                    prev = 1.0
                Z[i, j] = w[s, i - 1, j - 1] * prev
        expo = 0.0
        for k in range(npts):
            expo += uu[k] * Z[pts[k, 0], pts[k, 1]]
        out[s] = exp(-expo)
    return out
