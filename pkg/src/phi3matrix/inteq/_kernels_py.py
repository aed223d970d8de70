"""Pure numpy versions of the compiled kernels (same signatures)."""

from __future__ import annotations

import numpy as np

_CHUNK = 256


def quotient_apply(X, F, wrho, dF):
    X = np.asarray(X, dtype=float)
    F = np.asarray(F)
    wrho = np.asarray(wrho)
    n = X.size
    out = np.empty(n, dtype=np.result_type(F, wrho, float))
    for start in range(0, n, _CHUNK):
        rows = slice(start, min(start + _CHUNK, n))
        dx = X[rows, None] - X[None, :]
        df = F[rows, None] - F[None, :]
        idx = np.arange(rows.start, rows.stop)
        dx[idx - start, idx] = 1.0
        q = df / dx
        q[idx - start, idx] = 0.0
        out[rows] = q @ wrho
    return out + wrho * dF


def offdiag_kernel(X, wrho):
    X = np.asarray(X, dtype=float)
    wrho = np.asarray(wrho)
    dx = X[:, None] - X[None, :]
    np.fill_diagonal(dx, 1.0)
    K = wrho[None, :] / dx
    np.fill_diagonal(K, 0.0)
    return K
