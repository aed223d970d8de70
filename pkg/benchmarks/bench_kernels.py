"""Compare the compiled and numpy kernels on the production grid.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from phi3matrix.inteq import _kernels_py, make_grid
from phi3matrix.inteq.solver import closed_form_W
from phi3matrix.spectral import solve_c

try:
    from phi3matrix.inteq import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    grid = make_grid(n=args.n)
    cp = solve_c(lam=0.3)
    cand = closed_form_W(cp)
    X = grid.nodes
    F = np.ascontiguousarray(cand.f(X), dtype=float)
    dF = np.ascontiguousarray(cand.df(X), dtype=float)
    wrho = np.ascontiguousarray(grid.weights * cp.lam2.real * 2 / np.sqrt(X))

    rows = []
    ref_q = _kernels_py.quotient_apply(X, F, wrho, dF)
    ref_k = _kernels_py.offdiag_kernel(X, wrho)
    rows.append(("quotient_apply", "numpy", best_of(lambda: _kernels_py.quotient_apply(X, F, wrho, dF), args.repeat), 0.0))
    rows.append(("offdiag_kernel", "numpy", best_of(lambda: _kernels_py.offdiag_kernel(X, wrho), args.repeat), 0.0))
    if compiled is not None:
        q = compiled.quotient_apply(X, F, wrho, dF)
        k = compiled.offdiag_kernel(X, wrho)
        dq = float(np.max(np.abs(q - ref_q)) / np.max(np.abs(ref_q)))
        dk = float(np.max(np.abs(k - ref_k)) / np.max(np.abs(ref_k)))
        rows.append(("quotient_apply", "cython", best_of(lambda: compiled.quotient_apply(X, F, wrho, dF), args.repeat), dq))
        rows.append(("offdiag_kernel", "cython", best_of(lambda: compiled.offdiag_kernel(X, wrho), args.repeat), dk))
    else:
        print("compiled kernels unavailable; showing the numpy fallback only")

    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':<16}{'backend':<9}{'seconds':>10}{'rel. diff':>12}")
    for name, backend, t, d in rows:
        print(f"{name:<16}{backend:<9}{t:>10.4f}{d:>12.1e}")


if __name__ == "__main__":
    main()
