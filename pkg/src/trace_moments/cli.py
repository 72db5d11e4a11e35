"""Command-line front end.

Exit codes: 0 success, 1 runtime failure or a failed check, 2 invalid
configuration or input.  Library errors are reported by class name on
stderr without a traceback.  Floats are written as shortest round-trip
``repr`` strings, so output is byte-identical for identical arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import algebra, distributions, geometry, plotting, verify
from .core import EnsembleParams, Spectrum, TraceVector, make_params
from .errors import TraceMomentsError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SEED_ENV = "TRACE_MOMENTS_SEED"
# preference order when one sampler's draws are needed for an overlay
_PLOT_PREFERENCE = ("tridiagonal", "exact", "dense", "mcmc")


class ConfigError(ValueError):
    """Invalid command-line input that argparse cannot catch itself."""


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _json_float(x):
    # JSON has no infinities; keep the textual form the CSV uses
    x = float(x)
    return x if math.isfinite(x) else fmt(x)


def render_table(header: Sequence[str], rows, fmt_name: str) -> str:
    if fmt_name == "json":
        recs = [{h: (_json_float(v) if isinstance(v, float) else v) for h, v in zip(header, r)}
                for r in rows]
        return json.dumps(recs, indent=2, default=_json_default) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from exc


def _params(args) -> EnsembleParams:
    return make_params(args.n, args.beta)


def _trace_input(args) -> TraceVector:
    """Trace vector from ``--spectrum``, ``--traces`` or ``--traces-file``."""
    sources = [s for s in (args.spectrum, args.traces, args.traces_file) if s is not None]
    if len(sources) != 1:
        raise ConfigError("give exactly one of --spectrum, --traces, --traces-file")
    if args.spectrum is not None:
        vals = _parse_floats(args.spectrum)
        if not vals:
            raise ConfigError("--spectrum is empty")
        r_max = args.r_max or 2 * len(vals)
        return algebra.traces_from_spectrum(Spectrum(tuple(vals)), r_max)
    if args.traces_file is not None:
        try:
            with open(args.traces_file) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.traces_file}: {exc.strerror}") from exc
        vals = _parse_floats(" ".join(text.split()).replace(" ", ","))
    else:
        vals = _parse_floats(args.traces)
    if args.n is None:
        raise ConfigError("--n is required with a trace vector")
    if not vals:
        raise ConfigError("trace vector is empty")
    return TraceVector(args.n, tuple(vals))


def _write_plots(args, params, t1, t2) -> None:
    if not (args.plot_script or args.figure):
        return
    overlays = plotting.trace_overlays(params, t1, t2, bins=args.bins)
    if args.plot_script:
        with open(args.plot_script, "w", newline="") as fh:
            fh.write(plotting.gnuplot_script(params, overlays))
    if args.figure:
        plotting.save_figure(params, overlays, args.figure)


# ------------------------------------------------------------------ commands


def cmd_sample(args) -> int:
    params = _params(args)
    seed = _resolve_seed(args)
    r_max = args.r_max or 2
    if args.sampler == "exact" and r_max != 2:
        raise ConfigError("the exact sampler only produces t1 and t2 (use --r-max 2)")
    if args.samples < 1:
        raise ConfigError("--samples must be positive")
    traces = verify.draw_traces(params, args.sampler, args.samples, seed, r_max)
    header = [f"t{r}" for r in range(1, traces.shape[1] + 1)]
    _emit(render_table(header, traces.tolist(), args.format), args.output)
    _write_plots(args, params, traces[:, 0], traces[:, 1])
    return EXIT_OK


def _grid_points(spec: str):
    try:
        a, b = spec.split(",")
        axes = []
        for part in (a, b):
            lo, hi, cnt = part.split(":")
            axes.append(np.linspace(float(lo), float(hi), int(cnt)))
    except ValueError as exc:
        raise ConfigError(f"--grid expects lo:hi:count,lo:hi:count, got {spec!r}") from exc
    return [(float(x), float(y)) for x in axes[0] for y in axes[1]]


def cmd_density(args) -> int:
    params = _params(args)
    params.require_exponent(1.0)
    if (args.points is None) == (args.grid is None):
        raise ConfigError("give exactly one of --points or --grid")
    if args.points is not None:
        flat = _parse_floats(args.points.replace(";", " , "))
        if len(flat) % 2:
            raise ConfigError("--points needs t1,t2 pairs")
        pts = list(zip(flat[0::2], flat[1::2]))
    else:
        pts = _grid_points(args.grid)
    rows = [(t1, t2, distributions.log_q_t1_t2(params, t1, t2)) for t1, t2 in pts]
    _emit(render_table(["t1", "t2", "log_q"], rows, args.format), args.output)
    return EXIT_OK


def cmd_moments(args) -> int:
    params = _params(args)
    if args.k < 0 or args.nn < 0:
        raise ConfigError("--k and --nn must be non-negative")
    value = distributions.mixed_moment(params, args.k, args.nn)
    rows = [(args.n, float(args.beta), args.k, args.nn, value, distributions.mean_t2(params))]
    header = ["n", "beta", "k", "nn", "moment", "mean_t2"]
    _emit(render_table(header, rows, args.format), args.output)
    return EXIT_OK


def _sampler_set(args, params) -> List[str]:
    if args.sampler:
        chosen = []
        for item in args.sampler:
            chosen.extend(s.strip() for s in item.split(",") if s.strip())
        bad = sorted(set(chosen) - set(verify.SAMPLERS))
        if bad:
            raise ConfigError(f"unknown sampler(s): {', '.join(bad)}")
        return [s for s in verify.SAMPLERS if s in chosen]
    # the dense model only exists for beta in {1, 2}
    return [s for s in verify.SAMPLERS if s != "dense" or params.beta in (1.0, 2.0)]


def cmd_verify(args) -> int:
    params = _params(args)
    params.require_exponent(1.0)
    seed = _resolve_seed(args)
    samplers = _sampler_set(args, params)
    if args.samples < 1000:
        raise ConfigError("--samples must be at least 1000 for a campaign")
    threads = args.threads or os.cpu_count() or 1
    reports = verify.run_campaign(params, args.samples, seed, samplers, threads=threads)
    if args.format == "json":
        text = verify.reports_to_json(reports) + "\n"
    else:
        text = verify.reports_to_csv(reports)
    _emit(text, args.output)
    if args.plot_script or args.figure:
        name = next(s for s in _PLOT_PREFERENCE if s in samplers)
        tr = verify.draw_traces(params, name, args.samples, seed, 2)
        _write_plots(args, params, tr[:, 0], tr[:, 1])
    failed = [r.name for r in reports if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(reports)} checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_bounds(args) -> int:
    t = _trace_input(args)
    report = geometry.cauchy_schwarz_check(t)
    if len(t) >= 3:
        report = report + geometry.t2_cut_check(t)
    rows = [(c.name, c.lhs, c.rhs, c.satisfied, c.equality) for c in report.checks]
    _emit(render_table(["name", "lhs", "rhs", "satisfied", "equality"], rows, args.format),
          args.output)
    return EXIT_OK if report.all_satisfied else EXIT_FAIL


def cmd_standardize(args) -> int:
    t = _trace_input(args)
    delta, c, t_std = algebra.standardize_traces(t)
    rows = [("delta", delta), ("c", c)]
    rows += [(f"t{r}", v) for r, v in enumerate(t_std.values, start=1)]
    _emit(render_table(["quantity", "value"], rows, args.format), args.output)
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _add_params(p, required=True):
    p.add_argument("--n", type=int, required=required, help="matrix size N")
    p.add_argument("--beta", type=float, required=required, help="Dyson index beta > 0")


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="output file (default: stdout)")


def _add_plots(p):
    p.add_argument("--bins", type=int, default=50, help="histogram bins for plots")
    p.add_argument("--plot-script", metavar="PATH", help="write a gnuplot overlay script")
    p.add_argument("--figure", metavar="PATH", help="render the overlay with matplotlib")


def _add_trace_input(p):
    p.add_argument("--n", type=int, help="matrix size N (required with --traces)")
    p.add_argument("--traces", help="comma-separated t_1,t_2,...")
    p.add_argument("--traces-file", help="file with whitespace/comma-separated traces")
    p.add_argument("--spectrum", help="comma-separated eigenvalues")
    p.add_argument("--r-max", type=int, help="traces computed from --spectrum (default 2N)")
    _add_output(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trace-moments",
        description="Exact laws of the first two traces of Gaussian beta-ensembles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw trace vectors from a sampler")
    _add_params(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, help=f"random seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--sampler", choices=verify.SAMPLERS, default="tridiagonal")
    p.add_argument("--r-max", type=int, help="number of traces per row (default 2)")
    _add_output(p)
    _add_plots(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("density", help="log joint density of (t1, t2)")
    _add_params(p)
    p.add_argument("--points", help="t1,t2 pairs separated by ';'")
    p.add_argument("--grid", help="t1lo:t1hi:count,t2lo:t2hi:count")
    _add_output(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("moments", help="mixed moment E[t1^(2k) t2^n]")
    _add_params(p)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--nn", type=int, default=0)
    _add_output(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("verify", help="run a Monte Carlo verification campaign")
    _add_params(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, help=f"random seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--sampler", action="append",
                   help="sampler(s) to include, repeatable or comma-separated (default: all valid)")
    p.add_argument("--threads", type=int, help="worker threads (default: CPU count)")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--output", help="report file (default: stdout)")
    _add_plots(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="check trace inequalities")
    _add_trace_input(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("standardize", help="shift and scale traces to t1=0, t2=1")
    _add_trace_input(p)
    p.set_defaults(func=cmd_standardize)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TraceMomentsError as exc:
        name = type(exc).__name__
        code = EXIT_CONFIG if isinstance(exc, ValueError) else EXIT_FAIL
        print(f"error: {name}: {exc}", file=sys.stderr)
        return code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        # downstream closed early (e.g. `| head`); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (OSError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
