"""Command-line interface: every analysis as a subcommand with CSV/JSON output.

Exit codes: 0 success, 2 configuration errors, 3 numerical failures; errors
are emitted as a JSON object on stderr.  CSV files begin with a versioned
schema comment line; JSON payloads carry schema_version.  Sweeps evaluate
their alpha grids concurrently (PTSTRING_THREADS caps the workers, 0 or
unset = auto) but rows are always written in alpha order.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .collocation import build, spectrum_collocation
from .critical import NEGATIVE_E, POSITIVE_E, critical_sequence
from .density import DensityModel
from .discretize import assemble
from .eigen import spectrum
from .exact_solutions import SolvableString, isospectrality_check, pt_delta
from .extrapolate import NegativeSumRuleError, e1_estimate, singularity_estimate
from .fitting import fit_critical
from .sumrules import (
    EigenvalueBounds,
    SumRuleRangeError,
    eigenvalue_bounds,
    exact_sum_rule,
    sum_rule_range,
    trace_sum_rule,
)

SCHEMA_VERSION = 1

_BRANCH = {"pos": POSITIVE_E, "neg": NEGATIVE_E}


class ConfigError(ValueError):
    pass


def _max_workers() -> int:
    raw = os.environ.get("PTSTRING_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"PTSTRING_THREADS must be an integer, got {raw!r}")
    if n <= 0:
        return min(8, os.cpu_count() or 1)
    return n


def _parse_model(text: str) -> DensityModel:
    try:
        if os.path.exists(text):
            with open(text) as fh:
                return DensityModel.from_json(fh.read())
        return DensityModel.from_json(text)
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot parse density model {text!r}: {exc}")


def _parse_alpha_range(text: str):
    try:
        a, b, k = text.split(":")
        start, stop, steps = float(a), float(b), int(k)
    except ValueError:
        raise ConfigError(f"--alpha-range must be start:stop:steps, got {text!r}")
    if steps < 1 or stop < start:
        raise ConfigError("--alpha-range requires steps >= 1 and stop >= start")
    return np.linspace(start, stop, steps)


def _write_rows(args, header, rows, schema: str):
    rows = [[_fmt(v) for v in row] for row in rows]
    if args.format == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "schema": schema,
            "columns": header,
            "rows": rows,
        }
        _emit(args.out, json.dumps(payload, indent=2) + "\n")
    else:
        import io

        buf = io.StringIO()
        buf.write(f"# schema={schema} version={SCHEMA_VERSION} ptstring={__version__}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        _emit(args.out, buf.getvalue())


def _fmt(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _emit(out, text: str):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj: dict):
    obj = {"schema_version": SCHEMA_VERSION, **obj}
    _emit(args.out, json.dumps(obj, indent=2) + "\n")


# -- subcommand implementations ------------------------------------------------


def cmd_spectrum(args):
    model = _parse_model(args.model)
    alphas = _alpha_grid(args)
    parametric = model.kind in ("linear_pt", "quadratic_pt", "borg", "pt_borg")
    if not parametric and len(alphas) > 1:
        raise ConfigError(f"{model.kind!r} has no alpha parameter to sweep")
    n_modes = min(args.modes, args.N)

    def one(alpha):
        m = DensityModel(model.kind, alpha=float(alpha)) if parametric else model
        w = spectrum(assemble(m, args.N)).eigenvalues[:n_modes]
        return alpha, w

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        results = list(pool.map(one, alphas))
    results.sort(key=lambda t: t[0])
    rows = [
        [alpha, n + 1, w[n].real, w[n].imag]
        for alpha, w in results
        for n in range(len(w))
    ]
    _write_rows(args, ["alpha", "n", "re_e", "im_e"], rows, "spectrum")


def cmd_sumrules(args):
    model = _parse_model(args.model)
    pencil = assemble(model, args.N)
    rows = []
    try:
        srange = sum_rule_range(model)
    except SumRuleRangeError:
        srange = range(1, 5)  # trace-only models
    for s in srange:
        tr = trace_sum_rule(pencil, s)
        try:
            ex = exact_sum_rule(model, s, model.alpha)
            rel = abs(tr.value - ex.value) / abs(ex.value)
            rows.append([s, str(ex.exact), ex.value, tr.value.real, tr.value.imag, rel])
        except SumRuleRangeError:
            rows.append([s, "", "", tr.value.real, tr.value.imag, ""])
    _write_rows(
        args,
        ["s", "exact_fraction", "exact_value", "trace_re", "trace_im", "rel_diff"],
        rows,
        "sumrules",
    )


def cmd_bounds(args):
    model = _parse_model(args.model)
    alphas = _alpha_grid(args)
    rows = []
    for alpha in alphas:
        b = eigenvalue_bounds(model, args.s, alpha)
        if b.complex_spectrum_signaled:
            rows.append([alpha, args.s, "", "", True])
        else:
            rows.append([alpha, args.s, b.lower, b.upper, False])
    _write_rows(
        args,
        ["alpha", "s", "lower", "upper", "complex_spectrum_signaled"],
        rows,
        "bounds",
    )


def cmd_shanks(args):
    if args.singularity:
        sing = singularity_estimate(depth=max(args.depth, 1))
        _emit_json(args, {"singularity_alpha": sing, "depth": max(args.depth, 1)})
        return
    alphas = _alpha_grid(args)

    def one(alpha):
        try:
            est = e1_estimate(alpha, depth=args.depth)
            b = eigenvalue_bounds("linear_pt", 8, alpha)
            lower, upper = (b.lower, b.upper) if not b.complex_spectrum_signaled else ("", "")
        except NegativeSumRuleError:
            est, lower, upper = "", "", ""
        grid = build(DensityModel.linear_pt(alpha), args.M)
        e1 = spectrum_collocation(grid, 1).eigenvalues[0]
        return [alpha, est, lower, upper, e1.real]

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        rows = list(pool.map(one, alphas))
    rows.sort(key=lambda r: r[0])
    _write_rows(
        args,
        ["alpha", "e1_shanks", "lower_bound", "upper_bound", "e1_collocation"],
        rows,
        "shanks",
    )


def cmd_critical(args):
    model = _parse_model(args.model)
    pts = critical_sequence(model, args.count, args.N, branch=_BRANCH[args.branch])
    rows = [
        [p.index, p.alpha_c, p.e_c, p.branch, p.refinement_residual[0],
         p.refinement_residual[1], p.trunc_N, p.degraded]
        for p in pts
    ]
    _write_rows(
        args,
        ["n", "alpha_n", "e_n", "branch", "log10_F", "log10_dF", "trunc_N", "degraded"],
        rows,
        "critical",
    )


def cmd_fit(args):
    model = _parse_model(args.model)
    pts = critical_sequence(model, args.count, args.N, branch=_BRANCH[args.branch])
    result = fit_critical(pts)
    if args.format == "json":
        _emit_json(
            args,
            {
                "b": result.b, "c": result.c, "s": result.s,
                "sigma_b": result.sigma_b, "sigma_c": result.sigma_c,
                "sigma_s": result.sigma_s,
                "residual_norm": result.residual_norm,
                "orientation": result.orientation,
                "points": result.points_used,
            },
        )
        return
    rows = []
    for (alpha, e) in result.points_used:
        if result.orientation == "alpha_on_e":
            fitted = result.b + result.c * abs(e) ** (-result.s)
            rows.append([alpha, e, fitted, alpha - fitted])
        else:
            fitted = result.b + result.c * abs(alpha) ** (-result.s)
            rows.append([alpha, e, fitted, e - fitted])
    _write_rows(args, ["alpha_n", "e_n", "fitted", "residual"], rows, "fit_residuals")


def cmd_borg_verify(args):
    model = _parse_model(args.model)
    dev = isospectrality_check(model, args.N)
    _emit_json(
        args,
        {
            "model": model.to_json(),
            "N": args.N,
            "max_relative_deviation_from_uniform": dev,
            "isospectral_at_1e-7": bool(dev <= 1e-7),
        },
    )


def cmd_delta(args):
    model = _parse_model(args.model)
    string = SolvableString(model)
    xs = np.linspace(-0.5, 0.5, args.grid)
    vals = pt_delta(string, xs, args.y, terms=args.terms)
    rows = [[x, v.real, v.imag, abs(v)] for x, v in zip(xs, vals)]
    _write_rows(args, ["x", "re", "im", "abs"], rows, "pt_delta")


def cmd_table1(args):
    model = DensityModel.quadratic_pt(args.alpha)
    pencil = assemble(model, args.N)
    rows = []
    for s in range(1, 8):
        ex = exact_sum_rule(model, s, args.alpha)
        tr = trace_sum_rule(pencil, s)
        rel = abs(tr.value - ex.value) / abs(ex.value)
        rows.append([s, str(ex.exact), ex.value, tr.value.real, tr.value.imag, rel])
    _write_rows(
        args,
        ["s", "exact_fraction", "exact_value", "numeric_re", "numeric_im", "rel_diff"],
        rows,
        "table1",
    )


def _alpha_grid(args):
    if getattr(args, "alpha_range", None):
        return _parse_alpha_range(args.alpha_range)
    if getattr(args, "alpha", None) is not None:
        return np.array([args.alpha])
    raise ConfigError("provide --alpha or --alpha-range")


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ptstring",
        description="Spectra of strings with complex PT-symmetric density",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", required=True, help="density JSON or file path")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("spectrum", help="eigenvalue sweep over alpha")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-range", help="start:stop:steps")
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--modes", type=int, default=8)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sumrules", help="exact vs trace sum rules")
    common(p)
    p.add_argument("--N", type=int, default=256)
    p.set_defaults(func=cmd_sumrules)

    p = sub.add_parser("bounds", help="lowest-eigenvalue sandwich bounds")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-range", help="start:stop:steps")
    p.add_argument("--s", type=int, default=8)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("shanks", help="accelerated E1 estimates (linear density)")
    common(p, model=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-range", help="start:stop:steps")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--M", type=int, default=400)
    p.add_argument("--singularity", action="store_true",
                   help="report the pole of the accelerated estimate instead")
    p.set_defaults(func=cmd_shanks)

    p = sub.add_parser("critical", help="exceptional-point sequence")
    common(p)
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--N", type=int, default=96)
    p.add_argument("--branch", choices=("pos", "neg"), default="pos")
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("fit", help="power-law fit of the critical sequence")
    common(p)
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--N", type=int, default=128)
    p.add_argument("--branch", choices=("pos", "neg"), default="pos")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("borg-verify", help="isospectrality report")
    common(p)
    p.add_argument("--N", type=int, default=64)
    p.set_defaults(func=cmd_borg_verify)

    p = sub.add_parser("delta", help="PT-delta kernel profile")
    common(p)
    p.add_argument("--y", type=float, default=0.0)
    p.add_argument("--terms", type=int, default=50)
    p.add_argument("--grid", type=int, default=201)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("table1", help="quadratic-density sum-rule comparison")
    common(p, model=False)
    p.add_argument("--alpha", type=float, default=30.0)
    p.add_argument("--N", type=int, default=2000)
    p.set_defaults(func=cmd_table1)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        json.dump({"error": "config", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except Exception as exc:  # numerical failures
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
