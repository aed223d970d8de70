"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line. Run with::

    pytest tests/test_acceptance.py -s

or directly with ``python3 tests/test_acceptance.py`` for the bare summary.
"""

import math
import random
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from phi3matrix import (  # noqa: E402
    G1,
    G2,
    BoundarySpec,
    GN_single_boundary,
    G_1plus1,
    G_1plus1plus1,
    G_1plusTower,
    G_1plusTower_ansatz,
    G_multi_boundary,
    S2_hat,
    W,
    c_series,
    critical_point,
    solve_c,
)
from phi3matrix import bell, verify  # noqa: E402
from phi3matrix.inteq import (  # noqa: E402
    Candidate,
    closed_form_G11,
    closed_form_W,
    make_grid,
    residual_report,
    solve_W_inteq,
)


def verdict(n, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} [{n:2d}] {title}"
    if detail:
        line += f": {detail}"
    print(line)
    assert ok, line


def failed_params(reports):
    return [c.params for r in reports for c in r.checks if not c.passed]


def test_01_critical_point():
    t0 = time.perf_counter()
    L, c = critical_point()
    dt = time.perf_counter() - t0
    ok = abs(L - 0.490686) < 1e-5 and abs(c + 0.873759) < 1e-5 and dt < 1.0
    verdict(1, "critical point", ok, f"lambda_c={L:.9f} c_c={c:.9f} in {dt:.3f}s")


def test_02_coupling_series():
    coeffs = c_series(3)
    fitted = 0.0
    for lam in (0.05, 0.1, 0.2):
        series = sum(coeffs[k] * lam ** (2 * k) for k in range(4))
        dev = abs(solve_c(lam=lam).c - series)
        fitted = max(fitted, dev / lam**8)
    verdict(2, "coupling series", fitted < 10, f"fitted C={fitted:.4f} (< 10)")


def test_03_normalisation():
    rng = random.Random(3)
    worst = 0.0
    for i in range(100):
        if i % 2:
            cp = solve_c(lam=rng.uniform(-0.49, 0.49))
        else:
            cp = solve_c(-rng.uniform(0.0, 1.0) ** 2)
        worst = max(worst, abs(W(cp, 1.0) - 1))
    verdict(3, "normalisation W(1)=1", worst < 1e-12, f"max |W(1)-1| = {worst:.2e} over 100 couplings")


def test_04_integral_equation():
    t0 = time.perf_counter()
    grid = make_grid(n=2000, Xi=1e8)
    residuals, errors = [], []
    for lam in (0.1, 0.3):
        cp = solve_c(lam=lam)
        cand = closed_form_W(cp)
        residuals.append(residual_report("W", cand, grid, cp).sup)
        sol = solve_W_inteq(cp.lam2, grid=grid)
        errors.append(float(np.max(np.abs(sol - cand.f(grid.nodes)))))
    dt = time.perf_counter() - t0
    ok = max(residuals) < 1e-6 and max(errors) < 1e-5 and dt < 30
    detail = f"residual={max(residuals):.2e} solve error={max(errors):.2e} in {dt:.1f}s"
    verdict(4, "integral equation oracle", ok, detail)


def test_05_feynman_graphs():
    (rep,) = verify.run_suite("series")
    worst = max(abs(c.observed - c.expected) for c in rep.checks if "graph" in c.name or "G1 lambda^" in c.name)
    verdict(5, "perturbative graph expansion", rep.passed, f"{len(rep.checks)} checks, worst graph deviation {worst:.1e}")


def test_06_gamma_tower():
    bell._g_recursive.cache_clear()
    t0 = time.perf_counter()
    (rep,) = verify.run_suite("gamma", max_b=9)
    dt = time.perf_counter() - t0
    ok = rep.passed and dt < 60
    verdict(6, "gamma tower recursive == closed", ok, f"B=3..9 in {dt:.1f}s, failures {failed_params([rep])}")


def test_07_bell_identities():
    reports = verify.run_suite("bell", max_n=8) + verify.run_suite("conjecture", max_l=4, max_p=3, max_n=3)
    sweep = reports[1].checks[-1].observed
    ok = all(r.passed for r in reports)
    verdict(7, "Bell identities", ok, f"conjecture sweep {sweep}, failures {failed_params(reports)}")


def test_08_tower_cross_check():
    rng = random.Random(8)
    worst3 = worst45 = 0.0
    for lam in (0.1, 0.3):
        cp = solve_c(lam=lam)
        for _ in range(20):
            args = [rng.uniform(1.0, 50.0) for _ in range(5)]
            a, b = G_1plusTower(cp, args[:3]), G_1plus1plus1(cp, *args[:3])
            worst3 = max(worst3, abs(a - b) / abs(b))
            for B in (4, 5):
                t, g = G_1plusTower(cp, args[:B]), G_1plusTower_ansatz(cp, args[:B])
                worst45 = max(worst45, abs(t - g) / abs(g))
    # relative errors: the values themselves are far below the tolerances at large arguments
    ok = worst3 < 1e-12 and worst45 < 1e-10
    verdict(8, "tower vs (1+1+1) and gamma ansatz", ok, f"relative B=3 {worst3:.1e}, B=4,5 {worst45:.1e}")


def test_09_one_plus_one_residual():
    grid = make_grid(n=2000, Xi=1e8)
    cp = solve_c(lam=0.3)
    pts = np.logspace(0, 4, 5)
    worst = control = 0.0
    for Y in pts:
        cf = closed_form_G11(cp, Y)
        worst = max(worst, residual_report("G11", cf, grid, cp, Y=Y, points=pts).sup)
        # the discretised equation must notice a 1% error in the candidate
        bad = Candidate(lambda X, cf=cf: 1.01 * cf.f(X), lambda X, cf=cf: 1.01 * cf.df(X))
        control = max(control, residual_report("G11", bad, grid, cp, Y=Y, points=pts).sup)
    ok = worst < 1e-6 and control > 1e-6
    verdict(9, "(1+1) equation residual", ok, f"sup residual {worst:.2e} on a 5x5 grid, perturbed {control:.1e}")


def test_10_reflection_positivity():
    reports = verify.run_suite("schwinger", lam=0.3, lam2_imag=-0.04)
    real, imag = reports[0].checks
    bp_err = max(abs(a - b) for a, b in zip(imag.observed["branch_points"], imag.expected))
    detail = f"Im S2={real.observed['value'].imag:.4e}, branch point error {bp_err:.1e}"
    verdict(10, "reflection positivity violated", reports[0].passed, detail)


def test_11_free_theory():
    f = solve_c(0)
    rng = random.Random(11)
    worst = 0.0
    for _ in range(20):
        X, Y, Z, V = (rng.uniform(0.5, 100.0) for _ in range(4))
        x = rng.uniform(0.0, 10.0)
        p2 = complex(rng.uniform(-0.9, 10.0), rng.uniform(-5.0, 5.0))
        diffs = [
            W(f, X) - math.sqrt(X),
            G1(f, x),
            G2(f, X, Y) - 2 / (math.sqrt(X) + math.sqrt(Y)),
            GN_single_boundary(f, [X, Y, Z]),
            GN_single_boundary(f, [X, Y, Z, V]),
            G_1plus1(f, X, Y),
            G_1plus1plus1(f, X, Y, Z),
            G_1plusTower(f, [X, Y, Z, V]),
            G_multi_boundary(f, BoundarySpec(((X, Y), (Z, V)))),
            S2_hat(f, 1.0, p2) - 1 / (p2 + 1),
            S2_hat(f, 2.5, p2) - 1 / (p2 + 2.5),
        ]
        worst = max(worst, max(abs(d) for d in diffs))
    verdict(11, "free theory regression", worst < 1e-12, f"max deviation {worst:.1e}")


def richardson(f, x0):
    """Limit of f(d) as d -> 0 from d = x0 * 10^-k, k = 2, 3, 4 (two elimination steps)."""
    a, b, c = (f(x0 * 10.0**-k) for k in (2, 3, 4))
    ab, bc = (10 * b - a) / 9, (10 * c - b) / 9
    return (100 * bc - ab) / 99


def coincidence_cases(rng):
    cases = []
    for i in range(20):
        cp = solve_c(lam=rng.choice((0.1, 0.3)))
        X, Y, Z = (rng.uniform(1.0, 50.0) for _ in range(3))
        if i % 2 == 0:
            args = [X, Y, Z][: rng.choice((2, 3))] + [X]
            exact = GN_single_boundary(cp, args)
            limit = richardson(lambda d, a=args, cp=cp: GN_single_boundary(cp, a[:-1] + [a[-1] + d]), X)
        else:
            shape = i % 4
            if shape == 1:
                spec = lambda d: ((X, X + d), (Y,))
            else:
                spec = lambda d: ((X, Y, Y + d), (Z,))
            exact = G_multi_boundary(cp, BoundarySpec(spec(0.0)))
            limit = richardson(lambda d, s=spec, cp=cp: G_multi_boundary(cp, BoundarySpec(s(d))), X if shape == 1 else Y)
        cases.append((exact, limit))
    return cases


def test_12_coincidence_limits():
    cases = coincidence_cases(random.Random(12))
    worst = max(abs(e - l) for e, l in cases)
    verdict(12, "coincidence limits", worst < 1e-6, f"max |jet - Richardson| {worst:.1e} over {len(cases)} cases")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
