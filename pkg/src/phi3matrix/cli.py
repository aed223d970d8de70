"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 bad input or a
domain error, 3 a solver or quadrature failed to converge.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import os
import sys
from typing import Optional

import click
import numpy as np

from .correlators import BoundarySpec, G1, W, evaluate
from .errors import ConvergenceError, DomainError, InputError, Phi3Error, QuadratureError, SingularityError
from .spectral import C_C_PRECISE, LAMBDA_C_PRECISE, solve_c

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

CONFIG_ENV = "PHI3MATRIX_CONFIG"
EXIT_CHECK_FAILED = 1
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3


# -- serialisation -------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "value") and hasattr(v, "name") and not isinstance(v, (int, float, str)):
        return v.value
    return v


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=True) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


# -- parsing -------------------------------------------------------------------


def parse_complex(text) -> complex:
    """Accept 0.3, -0.04, 1+2i, 1-2j, 0.2i."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise InputError(f"cannot parse {text!r} as a complex number") from None


def _real_if_possible(z: complex):
    return z.real if z.imag == 0 else z


def parse_boundaries(text: str) -> list[list[float]]:
    """``"x1,x2|x3"`` -> [[x1, x2], [x3]]."""
    if text is None or not str(text).strip():
        raise InputError("empty boundary specification")
    out = []
    for block in str(text).split("|"):
        items = [t.strip() for t in block.split(",")]
        if not items or any(t == "" for t in items):
            raise InputError(f"malformed boundary block {block!r} in {text!r}")
        vals = []
        for t in items:
            try:
                v = float(t)
            except ValueError:
                raise InputError(f"cannot parse {t!r} in {text!r}") from None
            if not math.isfinite(v):
                raise InputError(f"non-finite argument {t!r}")
            vals.append(v)
        out.append(vals)
    return out


def _coupling(lam, lam2):
    if lam is not None and lam2 is not None:
        # a flag on the command line beats the other one coming from the config
        ctx = click.get_current_context(silent=True)
        if ctx is not None:
            src = {n: ctx.get_parameter_source(n) for n in ("lam", "lam2")}
            cmdline = click.core.ParameterSource.COMMANDLINE
            if src["lam"] == cmdline and src["lam2"] != cmdline:
                lam2 = None
            elif src["lam2"] == cmdline and src["lam"] != cmdline:
                lam = None
    if lam is not None and lam2 is not None:
        raise InputError("--lambda and --lambda2 are mutually exclusive")
    if lam is None and lam2 is None:
        raise InputError("one of --lambda or --lambda2 is required")
    if lam is not None:
        return solve_c(lam=_real_if_possible(parse_complex(lam)))
    return solve_c(_real_if_possible(parse_complex(lam2)))


def _guarded(fn):
    """Map package errors to the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConvergenceError, QuadratureError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONVERGENCE)
        except (InputError, DomainError, SingularityError, Phi3Error) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_DOMAIN)

    return wrapper


# -- config --------------------------------------------------------------------


_CONFIG_ALIASES = {"lambda": "lam", "lambda2": "lam2", "format": "fmt", "from": "start", "to": "stop", "big-X": "big_x"}


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise click.UsageError(f"cannot read config {path}: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise click.UsageError(f"malformed config {path}: {exc}")
    shared = {k: v for k, v in data.items() if not isinstance(v, dict)}
    default_map = {}
    for cmd in ("solve", "eval", "table", "verify", "schwinger"):
        section = dict(shared)
        section.update(data.get(cmd, {}))
        default_map[cmd] = {_CONFIG_ALIASES.get(k, k.replace("-", "_")): v for k, v in section.items()}
    return default_map


def _coupling_options(fn):
    fn = click.option("--lambda2", "lam2", default=None, help='Squared coupling, complex allowed ("-0.04", "0.01+0.002i").')(fn)
    fn = click.option("--lambda", "lam", default=None, help="Coupling lambda (real or imaginary).")(fn)
    return fn


def _output_options(fn):
    fn = click.option("--output", "-o", default=None, type=click.Path(dir_okay=False), help="Write to a file instead of stdout.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)(fn)
    return fn


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", default=None, type=click.Path(dir_okay=False), help=f"TOML defaults (or set ${CONFIG_ENV}).")
@click.pass_context
def main(ctx: click.Context, config_path: Optional[str]) -> None:
    """Planar correlation functions of the cubic matrix model."""
    ctx.default_map = _load_config(config_path)


# -- solve ---------------------------------------------------------------------


@main.command()
@_coupling_options
@click.option("--output", "-o", default=None, type=click.Path(dir_okay=False))
@_guarded
def solve(lam, lam2, output):
    """Solve the normalisation condition for c."""
    cp = _coupling(lam, lam2)
    out = {
        "lambda": cp.lam,
        "lambda2": cp.lam2,
        "c": cp.c,
        "rho0": cp.rho0,
        "critical": {"lambda_c": LAMBDA_C_PRECISE, "c_c": C_C_PRECISE},
        "residual": cp.residual,
    }
    _emit(_dump_json(out), output)


# -- eval ----------------------------------------------------------------------


@main.command("eval")
@_coupling_options
@click.option("--boundaries", "-b", multiple=True, required=True, help='Arguments per boundary, e.g. "1,2|3".')
@click.option("--big-X", "big_x", is_flag=True, help="Arguments are X values instead of x values.")
@_output_options
@_guarded
def eval_cmd(lam, lam2, boundaries, big_x, fmt, output):
    """Evaluate correlators; one row per --boundaries."""
    cp = _coupling(lam, lam2)
    rows = []
    for text in boundaries:
        blocks = parse_boundaries(text)
        if big_x:
            spec = BoundarySpec(tuple(tuple(b) for b in blocks))
            single = None
        else:
            if any(v < 0 for b in blocks for v in b):
                raise InputError("x arguments must be non-negative")
            spec = BoundarySpec.from_x(blocks, cp.e)
            single = blocks[0][0] if len(blocks) == 1 and len(blocks[0]) == 1 else None
        res = evaluate(cp, spec, single)
        rows.append({"spec": text, "value": complex(res.value), "provenance": res.provenance.value})
    if fmt == "csv":
        text = _dump_csv(
            ["spec", "value_re", "value_im", "provenance"],
            [[r["spec"], r["value"].real, r["value"].imag, r["provenance"]] for r in rows],
        )
    else:
        text = _dump_json({"lambda2": cp.lam2, "c": cp.c, "x_space": not big_x, "rows": rows})
    _emit(text, output)


# -- table ---------------------------------------------------------------------


TABLE_TARGETS = ("W", "G1", "G2diag", "S2")


def _table_value(cp, target, a, mu2):
    from .correlators import G2
    from .schwinger import S2_hat

    if target == "W":
        return W(cp, a)
    if target == "G1":
        return G1(cp, a)
    if target == "G2diag":
        return G2(cp, a, a)
    return S2_hat(cp, mu2, a)


@main.command()
@_coupling_options
@click.option("--target", type=click.Choice(TABLE_TARGETS), required=True, help="W(X), G1(x), G2(X,X) or S2(p^2).")
@click.option("--from", "start", type=float, required=True)
@click.option("--to", "stop", type=float, required=True)
@click.option("--steps", type=int, default=100, show_default=True)
@click.option("--mu2", type=float, default=1.0, show_default=True)
@click.option("--output", "-o", default=None, type=click.Path(dir_okay=False))
@_guarded
def table(lam, lam2, target, start, stop, steps, mu2, output):
    """Tabulate a function on an equidistant grid (CSV: arg,re,im)."""
    if not (math.isfinite(start) and math.isfinite(stop)) or not stop > start:
        raise InputError("the range must satisfy --from < --to")
    if steps < 2:
        raise InputError("--steps must be at least 2")
    cp = _coupling(lam, lam2)
    args = np.linspace(start, stop, steps)
    rows = []
    for a in args:
        v = complex(_table_value(cp, target, float(a), mu2))
        rows.append([float(a), v.real, v.imag])
    _emit(_dump_csv(["arg", "re", "im"], rows), output)


# -- verify --------------------------------------------------------------------


@main.command()
@click.option("--suite", type=click.Choice(["bell", "conjecture", "gamma", "inteq", "series", "schwinger", "all"]), default="all", show_default=True)
@click.option("--max-b", type=int, default=9, show_default=True, help="gamma: largest B.")
@click.option("--max-l", type=int, default=4, show_default=True, help="conjecture: largest l.")
@click.option("--max-p", type=int, default=3, show_default=True, help="conjecture: largest p.")
@click.option("--max-n", type=int, default=3, show_default=True, help="conjecture: largest n_i.")
@click.option("--lambda", "lam", default="0.3", show_default=True, help="schwinger: real coupling for the sign test.")
@click.option("--grid-n", type=int, default=2000, show_default=True, help="inteq: number of nodes.")
@click.option("--xi", type=float, default=1e8, show_default=True, help="inteq: cutoff.")
@click.option("--output", "-o", default=None, type=click.Path(dir_okay=False))
@_guarded
def verify(suite, max_b, max_l, max_p, max_n, lam, grid_n, xi, output):
    """Run cross-check suites; exits 1 if any check fails."""
    from .verify import run_suite

    lam_val = parse_complex(lam)
    if lam_val.imag != 0:
        raise InputError("the schwinger sign test needs a real coupling")
    reports = run_suite(
        suite, max_b=max_b, max_l=max_l, max_p=max_p, max_n=max_n, lam=lam_val.real, n=grid_n, Xi=xi
    )
    for r in reports:
        for c in r.failures():
            click.echo(f"FAIL {r.suite}: {c.name} {c.params}", err=True)
    out = {"passed": all(r.passed for r in reports), "suites": [r.as_dict() for r in reports]}
    for s in out["suites"]:
        s.pop("seconds")  # keep the report byte-identical between runs
    _emit(_dump_json(out), output)
    if not out["passed"]:
        sys.exit(EXIT_CHECK_FAILED)


# -- schwinger -----------------------------------------------------------------


@main.command()
@_coupling_options
@click.option("--mu2", type=float, default=1.0, show_default=True)
@click.option("--scan-re", nargs=3, type=float, default=None, help="Re p^2 range: FROM TO STEPS.")
@click.option("--scan-im", nargs=3, type=float, default=None, help="Im p^2 range: FROM TO STEPS.")
@_output_options
@_guarded
def schwinger(lam, lam2, mu2, scan_re, scan_im, fmt, output):
    """Positivity diagnostics of the 2-point function, or a CSV scan."""
    from .schwinger import positivity_check, scan_S2

    if not mu2 > 0:
        raise InputError("--mu2 must be positive")
    cp = _coupling(lam, lam2)
    if scan_re or scan_im or fmt == "csv":
        re_r = scan_re or (-3.0, 3.0, 13)
        im_r = scan_im or (0.0, 0.0, 1)
        if re_r[1] < re_r[0] or im_r[1] < im_r[0]:
            raise InputError("scan ranges must be increasing")
        rows = scan_S2(cp, mu2, re_r[:2], im_r[:2], (int(re_r[2]), int(im_r[2])))
        body = [
            [p.real, p.imag, (v.real if v is not None else ""), (v.imag if v is not None else "")]
            for p, v in rows
        ]
        _emit(_dump_csv(["p2_re", "p2_im", "re", "im"], body), output)
        return
    rep = positivity_check(cp, mu2)
    out = {
        "lambda": cp.lam,
        "lambda2": cp.lam2,
        "c": cp.c,
        "mu2": mu2,
        "test_point": rep.test_point,
        "S2_value": rep.value,
        "imaginary_part_sign": rep.imaginary_part_sign,
        "verdict": rep.verdict,
        "note": rep.note,
        "branch_points": rep.branch_points,
    }
    _emit(_dump_json(out), output)


if __name__ == "__main__":
    main()
