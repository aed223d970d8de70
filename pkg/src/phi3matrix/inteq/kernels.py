"""Kernel backend chosen at import: compiled if the extension was built."""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
quotient_apply = _kernels_py.quotient_apply
offdiag_kernel = _kernels_py.offdiag_kernel

if os.environ.get("PHI3MATRIX_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        import numpy as np

        def quotient_apply(X, F, wrho, dF):  # noqa: F811
            dtype = np.complex128 if np.iscomplexobj(F) or np.iscomplexobj(wrho) or np.iscomplexobj(dF) else np.float64
            return _compiled.quotient_apply(
                np.ascontiguousarray(X, dtype=np.float64),
                np.ascontiguousarray(F, dtype=dtype),
                np.ascontiguousarray(wrho, dtype=dtype),
                np.ascontiguousarray(dF, dtype=dtype),
            )

        def offdiag_kernel(X, wrho):  # noqa: F811
            dtype = np.complex128 if np.iscomplexobj(wrho) else np.float64
            return _compiled.offdiag_kernel(
                np.ascontiguousarray(X, dtype=np.float64), np.ascontiguousarray(wrho, dtype=dtype)
            )

        BACKEND = "cython"

__all__ = ["BACKEND", "quotient_apply", "offdiag_kernel"]
