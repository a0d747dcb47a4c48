"""Command-line front end.

Exit codes: 0 success, 1 verification or transfer failure, 2 usage error
(including violated comparison hypotheses), 3 numeric precondition failure.
Results go to stdout, diagnostics to stderr. ``HEATSPEC_TABLE_WIDTH`` caps
the width of table cells; nothing else is read from the environment.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .coefficients import HeatCoefficientSet, heat_coefficients
from .discriminator import (
    DEFAULT_FIT_TOL,
    HypothesisViolation,
    InconsistentDataError,
    SpectralDataset,
    compare_manifolds,
    dataset_from_coefficient_sets,
    dataset_from_fits,
    dataset_from_model,
)
from .exact import ExactValue, as_exact, parse_exact
from .exterior import PAIRS, normalize_bc, normalize_pair
from .fitting import DEFAULT_N_TERMS, FitPreconditionError, compare, default_t_grid, fit_spectrum
from .geometry import ModelManifold, catalog, classify_boundary, model_from_name
from .spectra import EigenvalueList, SpectrumError, TailBoundError, spectrum
from .verify import DEFAULT_LAMBDA_MAX, SUITES, cached_spectrum, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _g(x: float) -> str:
    return f"{x:.15g}"


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------


def _emit_json(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _emit_rows(header: Sequence[str], rows: Sequence[Sequence], fmt: str, out) -> None:
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    width = int(os.environ.get("HEATSPEC_TABLE_WIDTH", "0") or 0)
    cells = [[str(c) for c in header]] + [[str(c) for c in r] for r in rows]
    if width > 0:
        cells = [[c if len(c) <= width else c[: max(width - 1, 1)] + "~" for c in r] for r in cells]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for k, r in enumerate(cells):
        out.write("  ".join(c.ljust(widths[i]) for i, c in enumerate(r)).rstrip() + "\n")
        if k == 0:
            out.write("  ".join("-" * w for w in widths) + "\n")


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _m_range(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            r = range(int(lo), int(hi) + 1)
        else:
            r = range(int(text), int(text) + 1)
    except ValueError:
        r = range(0)
    if not r or r[0] < 1:
        raise argparse.ArgumentTypeError(f"bad m range {text!r}; use e.g. 2..8")
    return r


def _exact_arg(text: str) -> ExactValue:
    try:
        return parse_exact(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_exact(text).as_fraction()
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not rational") from None


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _add_model_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--model", choices=["interval", "disk", "cylinder", "hemisphere"], required=required)
    p.add_argument("--radius", type=_exact_arg, help="disk or cylinder radius (rational)")
    p.add_argument("--height", type=_exact_arg, help="cylinder height, e.g. pi or 2pi")
    p.add_argument("--length", type=_exact_arg, help="interval length, e.g. pi")


def _add_format(p: argparse.ArgumentParser, default: str = "table") -> None:
    p.add_argument("--format", choices=["json", "csv", "table"], default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatspec", description="Heat invariants and boundary geometry.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list the model manifolds")
    _add_format(p)

    p = sub.add_parser("coeff", help="closed-form a0..a3")
    _add_model_args(p)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--bc", default="dirichlet")
    _add_format(p)

    p = sub.add_parser("spectrum", help="exact eigenvalues up to lambda-max")
    _add_model_args(p)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--bc", default="dirichlet")
    p.add_argument("--lambda-max", type=_positive_float, default=DEFAULT_LAMBDA_MAX)
    _add_format(p, "csv")

    p = sub.add_parser("fit", help="fit a0..a3 from a heat trace")
    _add_model_args(p, required=False)
    p.add_argument("--spectrum", type=Path, help="CSV spectrum instead of a model")
    p.add_argument("--m", type=int, help="dimension of a CSV spectrum")
    p.add_argument("--weyl", type=_positive_float, help="Weyl constant certifying a CSV spectrum")
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--bc", default="dirichlet")
    p.add_argument("--lambda-max", type=_positive_float, default=DEFAULT_LAMBDA_MAX)
    p.add_argument("--n-terms", type=int, default=DEFAULT_N_TERMS)
    p.add_argument("--t-min", type=_positive_float)
    p.add_argument("--t-max", type=_positive_float)
    p.add_argument("--t-points", type=int, default=60)
    _add_format(p)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    p.add_argument("--m-range", type=_m_range)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda-max", type=_positive_float, default=DEFAULT_LAMBDA_MAX)
    p.add_argument("--timing", action="store_true", help="include run times (output no longer byte-stable)")
    _add_format(p)

    p = sub.add_parser("discriminate", help="compare the boundary data of two manifolds")
    p.add_argument("--a", nargs="+", required=True, metavar="SOURCE")
    p.add_argument("--b", nargs="+", required=True, metavar="SOURCE")
    p.add_argument("--pair", default="dn")
    p.add_argument("--tau", type=_rational_arg, required=True, help="Einstein scalar curvature of both sides")
    p.add_argument("--tau-a", type=_rational_arg, help="override --tau for side A")
    p.add_argument("--tau-b", type=_rational_arg, help="override --tau for side B")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_FIT_TOL, help="fitted-route tolerance in units of vol(dM)")
    p.add_argument("--route", choices=["exact", "fitted"], default="exact", help="route for model: sources")
    p.add_argument("--lambda-max", type=_positive_float, default=DEFAULT_LAMBDA_MAX)
    _add_format(p, "json")
    return parser


def _model(args) -> ModelManifold:
    params = {}
    for name in ("radius", "height", "length"):
        v = getattr(args, name, None)
        if v is not None:
            params[name] = v
    allowed = {"interval": {"length"}, "disk": {"radius"}, "cylinder": {"height", "radius"}, "hemisphere": set()}
    extra = set(params) - allowed[args.model]
    if extra:
        raise UsageError(f"--{'/--'.join(sorted(extra))} not valid for {args.model}")
    try:
        return model_from_name(args.model, **params)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _bc(text: str) -> str:
    try:
        return normalize_bc(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_catalog(args, out, err) -> int:
    models = catalog()
    if args.format == "json":
        items = []
        for mdl in models:
            d = mdl.to_json()
            d["classification"] = classify_boundary(mdl.invariants()).to_json()
            items.append(d)
        _emit_json({"models": items}, out)
        return EXIT_OK
    rows = []
    for mdl in models:
        inv = mdl.invariants()
        c = classify_boundary(inv)
        flags = [k for k, v in c.flags().items() if v]
        rows.append([mdl.name + mdl.parameters_text(), mdl.m, mdl.tau, mdl.vol_M, mdl.vol_dM, inv.I0, inv.I1, inv.I2, "|".join(flags) or "none"])
    _emit_rows(["model", "m", "tau", "vol_M", "vol_dM", "I0", "I1", "I2", "boundary"], rows, args.format, out)
    return EXIT_OK


def cmd_coeff(args, out, err) -> int:
    mdl = _model(args)
    bc = _bc(args.bc)
    if not 0 <= args.p <= mdl.m:
        raise UsageError(f"--p must lie in 0..{mdl.m}")
    cs = heat_coefficients(mdl, args.p, bc)
    if args.format == "json":
        d = cs.to_json()
        d["parameters"] = {k: v.to_json() for k, v in sorted(mdl.parameters.items())}
        _emit_json(d, out)
        return EXIT_OK
    rows = [[f"a{n}", str(v), _g(float(v))] for n, v in enumerate(cs.a)]
    _emit_rows(["n", "exact", "float"], rows, args.format, out)
    return EXIT_OK


def _spectrum(args) -> EigenvalueList:
    mdl = _model(args)
    bc = _bc(args.bc)
    return spectrum(mdl, args.p, bc, args.lambda_max)


def cmd_spectrum(args, out, err) -> int:
    spec = _spectrum(args)
    if args.format == "csv":
        out.write(spec.to_csv())
    elif args.format == "json":
        _emit_json(
            {
                "model": spec.model,
                "m": spec.m,
                "p": spec.p,
                "bc": spec.bc,
                "lambda_max": spec.lambda_max,
                "weyl_constant": float(_g(spec.weyl_constant)),
                "count": spec.count(),
                "entries": [[float(_g(lam)), k] for lam, k in spec.entries],
            },
            out,
        )
    else:
        _emit_rows(["lambda", "multiplicity"], [[_g(lam), k] for lam, k in spec.entries], "table", out)
    return EXIT_OK


def cmd_fit(args, out, err) -> int:
    if (args.model is None) == (args.spectrum is None):
        raise UsageError("give exactly one of --model or --spectrum")
    exact = None
    if args.model is not None:
        spec = _spectrum(args)
        exact = heat_coefficients(_model(args), args.p, _bc(args.bc))
    else:
        if args.m is None:
            raise UsageError("--m is required with --spectrum")
        try:
            spec = EigenvalueList.from_csv(
                args.spectrum, args.m, args.lambda_max, args.weyl, args.p, _bc(args.bc) if args.bc else "unknown"
            )
        except (OSError, SpectrumError) as exc:
            raise UsageError(str(exc)) from None
        if not spec.certified:
            print("warning: Weyl constant estimated from the data; tail bounds are not certified", file=err)
    if args.t_min is not None or args.t_max is not None:
        base = default_t_grid(spec.lambda_max)
        lo = args.t_min if args.t_min is not None else float(base[0])
        hi = args.t_max if args.t_max is not None else float(base[-1])
        grid = np.geomspace(lo, hi, args.t_points)
    else:
        grid = default_t_grid(spec.lambda_max, args.t_points)
    res = fit_spectrum(spec, grid, args.n_terms)
    report = compare(res, exact) if exact is not None else None
    if args.format == "json":
        d = res.to_json()
        if report is not None:
            d["comparison"] = report.to_json()
        _emit_json(d, out)
    else:
        rows = []
        for n in range(4):
            row = [f"a{n}", _g(res.a_hat[n]), _g(res.a_err[n])]
            if report is not None:
                c = report.checks[n]
                row += [str(exact.a[n]), _g(c.error), "PASS" if c.passed else "FAIL"]
            rows.append(row)
        header = ["n", "fitted", "term_change"] + (["exact", "error", "status"] if report is not None else [])
        _emit_rows(header, rows, args.format, out)
        if args.format == "table":
            out.write(f"condition {_g(res.condition_estimate)}  residual {_g(res.residual_norm)}\n")
    if report is not None and not report.passed:
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args, out, err) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(n, args.m_range, args.seed, args.lambda_max) for n in names]
    ok = all(r.passed for r in results)
    if args.format == "json":
        _emit_json({"passed": ok, "suites": [r.to_json(args.timing) for r in results]}, out)
    else:
        rows = []
        for r in results:
            for c in r.checks:
                rows.append([r.suite, c.name, "PASS" if c.passed else "FAIL", c.detail])
        _emit_rows(["suite", "check", "status", "detail"], rows, args.format, out)
        if args.format == "table":
            for r in results:
                tail = f" ({r.seconds:.2f} s)" if args.timing else ""
                out.write(f"{r.suite}: {'PASS' if r.passed else 'FAIL'}{tail}\n")
    return EXIT_OK if ok else EXIT_FAIL


def _load_side(sources: Sequence[str], args, pair: str, label: str, tau: Fraction, err) -> SpectralDataset:
    """Sources: ``model:<name>[,key=value...]``, one dataset/coefficient JSON, or CSV spectra.

    A model carries its own tau; when it differs from the declared one the
    comparison is refused.
    """
    if len(sources) == 1 and sources[0].startswith("model:"):
        spec = sources[0][len("model:"):]
        name, *kv = spec.split(",")
        params = {}
        for item in kv:
            k, _, v = item.partition("=")
            params[k.strip()] = as_exact(v.strip())
        try:
            mdl = model_from_name(name.strip(), **params)
        except (ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"bad model source {sources[0]!r}: {exc}") from None
        if mdl.m != args.m:
            raise UsageError(f"{label}: model has m={mdl.m}, --m is {args.m}")
        model_tau = mdl.tau.as_fraction()
        if model_tau != tau:
            raise HypothesisViolation(f"{label}: {mdl.name} has tau={model_tau}, declared tau={tau}")
        if args.route == "exact":
            return dataset_from_model(mdl, pair)
        fits = [fit_spectrum(cached_spectrum(mdl, p, bc, args.lambda_max)) for p, bc in PAIRS[pair]]
        return dataset_from_fits(fits, pair, model_tau, mdl.name)
    paths = [Path(s) for s in sources]
    for pth in paths:
        if not pth.exists():
            raise UsageError(f"{label}: no such file {pth}")
    if all(pth.suffix == ".json" for pth in paths):
        docs = [json.loads(pth.read_text(encoding="utf-8")) for pth in paths]
        if len(docs) == 1 and "provenance" in docs[0]:
            ds = SpectralDataset.from_json(docs[0])
            if ds.tau != tau or ds.m != args.m or ds.pair_kind != pair:
                raise HypothesisViolation(f"{label}: dataset (m, tau, pair) differs from the command line")
            return ds
        sets = []
        for d in docs:
            sets.extend(d if isinstance(d, list) else [d])
        try:
            return dataset_from_coefficient_sets([HeatCoefficientSet.from_json(d) for d in sets], pair, tau, label)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"{label}: bad coefficient JSON: {exc}") from None
    if len(paths) != 2:
        raise UsageError(f"{label}: give two CSV spectra in pair order {PAIRS[pair]}")
    lists = []
    for pth, (p, bc) in zip(paths, PAIRS[pair]):
        try:
            lst = EigenvalueList.from_csv(pth, args.m, p=p, bc=bc, model=pth.stem)
        except SpectrumError as exc:
            raise UsageError(f"{pth}: {exc}") from None
        if not lst.certified:
            print(f"warning: {pth}: Weyl constant estimated from the data", file=err)
        lists.append(lst)
    fits = [fit_spectrum(lst) for lst in lists]
    return dataset_from_fits(fits, pair, tau, label)


def cmd_discriminate(args, out, err) -> int:
    try:
        pair = normalize_pair(args.pair)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    tau_a = args.tau if args.tau_a is None else args.tau_a
    tau_b = args.tau if args.tau_b is None else args.tau_b
    A = _load_side(args.a, args, pair, "A", tau_a, err)
    B = _load_side(args.b, args, pair, "B", tau_b, err)
    rep = compare_manifolds(A, B, args.tol)
    if args.format == "json":
        _emit_json(rep.to_json(), out)
    else:
        rows = [[t.name, t.a_has, t.b_has, "holds" if t.holds else "FAILS"] for t in rep.transfers]
        _emit_rows(["property", "A", "B", "transfer"], rows, args.format, out)
        if args.format == "table":
            for k, v in rep.delta.items():
                out.write(f"delta {k} = {_g(float(v))}\n")
    return EXIT_OK if rep.all_hold else EXIT_FAIL


COMMANDS = {
    "catalog": cmd_catalog,
    "coeff": cmd_coeff,
    "spectrum": cmd_spectrum,
    "fit": cmd_fit,
    "verify": cmd_verify,
    "discriminate": cmd_discriminate,
}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args, out, err)
    except (UsageError, HypothesisViolation) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (FitPreconditionError, TailBoundError, InconsistentDataError) as exc:
        print(f"numeric precondition failed: {exc}", file=err)
        return EXIT_NUMERIC
    except (SpectrumError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
