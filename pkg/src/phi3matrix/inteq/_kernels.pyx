# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled difference-quotient kernels for the discretised integral equations."""

import numpy as np
cimport numpy as cnp

ctypedef fused scalar:
    double
    double complex


def quotient_apply(double[::1] X, scalar[::1] F, scalar[::1] wrho, scalar[::1] dF):
    """out_i = sum_{j != i} wrho_j (F_i - F_j)/(X_i - X_j) + wrho_i dF_i."""
    cdef Py_ssize_t n = X.shape[0], i, j
    cdef scalar acc, fi
    cdef double xi
    if scalar is double:
        out = np.empty(n, dtype=np.float64)
    else:
        out = np.empty(n, dtype=np.complex128)
    cdef scalar[::1] o = out
    for i in range(n):
        acc = wrho[i] * dF[i]
        fi = F[i]
        xi = X[i]
        for j in range(n):
            if j != i:
                acc = acc + wrho[j] * (fi - F[j]) / (xi - X[j])
        o[i] = acc
    return out


def offdiag_kernel(double[::1] X, scalar[::1] wrho):
    """K_ij = wrho_j / (X_i - X_j) for i != j, zero on the diagonal."""
    cdef Py_ssize_t n = X.shape[0], i, j
    if scalar is double:
        out = np.zeros((n, n), dtype=np.float64)
    else:
        out = np.zeros((n, n), dtype=np.complex128)
    cdef scalar[:, ::1] K = out
    cdef double xi
    for i in range(n):
        xi = X[i]
        for j in range(n):
            if j != i:
                K[i, j] = wrho[j] / (xi - X[j])
    return out
