"""Command-line interface: ``ipl fit | gof | simulate | eval``.

Exit codes: 0 success, 1 usage or data error, 2 (``fit`` only) the
optimiser did not converge; the result is still printed.
"""

import argparse
import json
import math
import re
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import model
from .estimation import fit_inverse_lindley, fit_mle, lr_test_alpha1
from .exceptions import IplError
from .gof import compare_models, gof_report
from .mc_study import StudyConfig, run_study
from .model import IplParams

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

_SPLIT = re.compile(r"[,\s]+")

_NUM = {"type": ["number", "null"]}
_STAT_PAIR = {
    "type": "object",
    "properties": {"stat": _NUM, "pvalue": _NUM},
    "required": ["stat", "pvalue"],
}
_PARAMS = {
    "type": "object",
    "properties": {"theta": _NUM, "alpha": _NUM},
    "required": ["theta", "alpha"],
}

#: JSON schema of ``ipl fit --format json``.
FIT_SCHEMA = {
    "type": "object",
    "properties": {
        "model": {"type": "string"},
        "n": {"type": "integer"},
        "params": _PARAMS,
        "std_err": _PARAMS,
        "loglik": _NUM,
        "aic": _NUM,
        "bic": _NUM,
        "ks": _STAT_PAIR,
        "lr_alpha1": _STAT_PAIR,
        "converged": {"type": "boolean"},
        "iterations": {"type": "integer"},
    },
    "required": ["model", "params", "std_err", "loglik", "aic", "bic", "ks", "lr_alpha1", "converged"],
}

#: JSON schema of ``ipl gof --format json``; models are listed best first.
GOF_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer"},
        "models": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "model": {"type": "string"},
                    "k": {"type": "integer"},
                    "params": {"anyOf": [_PARAMS, {"type": "null"}]},
                    "loglik": _NUM,
                    "neg2_loglik": _NUM,
                    "aic": _NUM,
                    "bic": _NUM,
                    "ks": _STAT_PAIR,
                    "error": {"type": ["string", "null"]},
                },
                "required": ["model", "k", "loglik", "aic", "bic", "ks", "error"],
            },
        },
    },
    "required": ["n", "models"],
}


class DataError(IplError, ValueError):
    """Input data could not be used."""


@dataclass(frozen=True)
class Dataset:
    source_path: str
    values: np.ndarray
    skipped_lines: int


def parse_dataset(source):
    """Read positive reals separated by newlines, commas or whitespace.

    ``source`` is a path, ``"-"`` for stdin, or an open text stream.  Lines
    that are blank or contain a non-numeric token (headers, comments) are
    skipped and counted.  Non-finite or nonpositive values are errors.
    """
    if hasattr(source, "read"):
        text, name = source.read(), getattr(source, "name", "<stream>")
    elif source == "-":
        text, name = sys.stdin.read(), "<stdin>"
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise DataError(f"cannot read {source}: {exc.strerror or exc}") from None
        name = str(source)

    values, skipped = [], 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = [t for t in _SPLIT.split(line.strip()) if t]
        try:
            nums = [float(t) for t in tokens]
        except ValueError:
            nums = []
        if not nums:
            skipped += 1
            continue
        for v in nums:
            if not math.isfinite(v) or v <= 0.0:
                raise DataError(f"{name}, line {lineno}: value {v!r} is not a finite positive number")
        values.extend(nums)
    if not values:
        raise DataError(f"{name}: no data values found")
    return Dataset(name, np.array(values), skipped)


# ---------------------------------------------------------------------------
# formatting


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _fmt(v):
    """Ten significant digits for human-readable tables."""
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "-"
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(v)
    return f"{v:.10g}"


def _table(rows):
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {_fmt(v)}" for k, v in rows)


def _std_err_dict(fit):
    out = {"theta": None, "alpha": None}
    if fit.std_err is not None:
        out.update(zip(fit.free_params, (_num(s) for s in fit.std_err)))
    return out


def fit_payload(fit, report, lr):
    return {
        "model": fit.model,
        "n": fit.n,
        "params": {"theta": _num(fit.params.theta), "alpha": _num(fit.params.alpha)},
        "std_err": _std_err_dict(fit),
        "loglik": _num(fit.loglik),
        "aic": _num(report.aic),
        "bic": _num(report.bic),
        "ks": {"stat": _num(report.ks_stat), "pvalue": _num(report.ks_pvalue)},
        "lr_alpha1": {"stat": _num(lr[0]), "pvalue": _num(lr[1])},
        "converged": bool(fit.converged),
        "iterations": fit.iterations,
        "grad_norm": _num(fit.grad_norm),
        "cov": None if fit.cov is None else [[_num(v) for v in row] for row in fit.cov],
    }


def gof_payload(reports, n):
    models = []
    for r in reports:
        models.append({
            "model": r.model_name,
            "k": r.k,
            "params": None if r.fit is None else {
                "theta": _num(r.fit.params.theta), "alpha": _num(r.fit.params.alpha)
            },
            "loglik": _num(r.loglik),
            "neg2_loglik": _num(r.neg2_loglik),
            "aic": _num(r.aic),
            "bic": _num(r.bic),
            "ks": {"stat": _num(r.ks_stat), "pvalue": _num(r.ks_pvalue)},
            "error": r.error,
        })
    return {"n": n, "models": models}


# ---------------------------------------------------------------------------
# commands


def _load(args):
    data = parse_dataset(args.input)
    if data.skipped_lines:
        print(f"note: skipped {data.skipped_lines} non-numeric line(s) in {data.source_path}", file=sys.stderr)
    return data


def cmd_fit(args):
    data = _load(args)
    fit = fit_mle(data.values)
    nested = fit_inverse_lindley(data.values)
    report = gof_report(fit, data.values)
    lr = lr_test_alpha1(data.values, full=fit, nested=nested)
    payload = fit_payload(fit, report, lr)
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(_table([
            ("model", fit.model),
            ("n", fit.n),
            ("theta", fit.params.theta),
            ("alpha", fit.params.alpha),
            ("se(theta)", payload["std_err"]["theta"]),
            ("se(alpha)", payload["std_err"]["alpha"]),
            ("loglik", fit.loglik),
            ("aic", report.aic),
            ("bic", report.bic),
            ("ks_stat", report.ks_stat),
            ("ks_pvalue", report.ks_pvalue),
            ("lr_alpha1_stat", lr[0]),
            ("lr_alpha1_pvalue", lr[1]),
            ("converged", fit.converged),
            ("iterations", fit.iterations),
        ]))
    if not fit.converged:
        print(f"warning: fit did not converge ({fit.message})", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_gof(args):
    data = _load(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reports = compare_models(data.values)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.format == "json":
        print(json.dumps(gof_payload(reports, data.values.size), indent=2))
        return EXIT_OK
    header = ("model", "k", "-2loglik", "aic", "bic", "ks_stat", "ks_pvalue")
    lines = [header] + [
        (r.model_name, r.k, r.neg2_loglik, r.aic, r.bic, r.ks_stat, r.ks_pvalue)
        if not r.failed else (r.model_name, r.k, "failed: " + r.error, "", "", "", "")
        for r in reports
    ]
    cells = [[c if isinstance(c, str) else _fmt(c) for c in row] for row in lines]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    for row in cells:
        print("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(row, widths))).rstrip())
    return EXIT_OK


def cmd_simulate(args):
    if len(args.theta) != len(args.alpha):
        raise DataError("--theta and --alpha must be given the same number of times")
    try:
        sizes = tuple(int(s) for s in args.sizes.split(",") if s.strip())
    except ValueError:
        raise DataError(f"--sizes must be a comma-separated list of integers, got {args.sizes!r}") from None
    cfg = StudyConfig(
        scenarios=tuple(zip(args.theta, args.alpha)),
        sample_sizes=sizes,
        replicates=args.reps,
        seed=args.seed,
        sampler=args.sampler,
    )
    table = run_study(cfg, workers=args.workers)
    text = table.to_csv() if args.format == "csv" else table.to_json() + "\n"
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_EVAL_FNS = {
    "pdf": model.pdf,
    "cdf": model.cdf,
    "survival": model.survival,
    "hazard": model.hazard,
}


def eval_grid(lo, hi, points, log=False):
    if not (lo > 0.0 and hi > lo):
        raise DataError("grid requires 0 < --from < --to")
    if points < 2:
        raise DataError("--points must be at least 2")
    grid = np.geomspace(lo, hi, points) if log else np.linspace(lo, hi, points)
    grid[0], grid[-1] = lo, hi
    return grid


def cmd_eval(args):
    p = IplParams(args.theta, args.alpha)
    grid = eval_grid(args.lo, args.hi, args.points, args.log)
    values = _EVAL_FNS[args.fn](p, grid)
    out = ["y,value"] + [f"{y!r},{v!r}" for y, v in zip(grid.tolist(), np.asarray(values).tolist())]
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="ipl", description="Inverse power Lindley distribution toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (("fit", "maximum-likelihood fit of a dataset"),
                           ("gof", "compare IPL and inverse Lindley fits")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--input", required=True, help="data file, or - for stdin")
        p.add_argument("--format", choices=("json", "table"), default="json")

    p = sub.add_parser("simulate", help="Monte Carlo bias/MSE study")
    p.add_argument("--theta", type=float, action="append", required=True, help="scenario theta (repeatable)")
    p.add_argument("--alpha", type=float, action="append", required=True, help="scenario alpha, paired with --theta")
    p.add_argument("--sizes", required=True, help="comma-separated increasing sample sizes")
    p.add_argument("--reps", type=int, required=True, help="replicates per cell")
    p.add_argument("--seed", type=int, default=1, help="64-bit RNG seed")
    p.add_argument("--sampler", choices=("inv", "mix"), default="inv", help="inverse transform or Lindley mixture")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=1, help="worker processes (output is identical)")
    p.add_argument("--output", help="output path (default stdout)")

    p = sub.add_parser("eval", help="tabulate pdf/cdf/survival/hazard over a grid")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--fn", choices=sorted(_EVAL_FNS), required=True)
    p.add_argument("--from", dest="lo", type=float, required=True)
    p.add_argument("--to", dest="hi", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--log", action="store_true", help="log-spaced grid")
    return parser


_COMMANDS = {"fit": cmd_fit, "gof": cmd_gof, "simulate": cmd_simulate, "eval": cmd_eval}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (IplError, OSError) as exc:
        print(f"ipl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
