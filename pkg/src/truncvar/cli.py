"""``truncvar`` command-line interface.

Exit codes: 0 success, 2 I/O or parse error, 3 invalid argument,
4 experiment verdict failure. ``TRUNCVAR_OUTPUT_DIR`` sets where outputs go
when no explicit path is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import asymptotics as asy
from .engine import truncvar_curve, tube_functions
from .experiments import KINDS, ConfigError, ExperimentConfig, default_config, run_experiment
from .paths import PathValidationError, SamplePath, total_variation, validate_path
from .simulate import ALGORITHM_ID, DiffusionSpec, GridSpec, RngSeed, sample_diffusion_euler

EXIT_OK = 0
EXIT_IO = 2
EXIT_ARG = 3
EXIT_VERDICT = 4

OUTPUT_DIR_ENV = "TRUNCVAR_OUTPUT_DIR"


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _fmt(x) -> str:
    # shortest round-trip representation, independent of locale
    return repr(float(x))


def _output_dir() -> Path | None:
    d = os.environ.get(OUTPUT_DIR_ENV)
    return Path(d) if d else None


def _write_text(target, text):
    if target is None or str(target) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {target}: {exc}", EXIT_IO) from exc


def read_csv_series(source) -> SamplePath:
    """Parse a ``time,value`` CSV (path or ``-`` for stdin) into a path."""
    try:
        if str(source) == "-":
            text = sys.stdin.read()
        else:
            text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {source}: {exc}", EXIT_IO) from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(f.strip() for f in r)]
    if not rows or [f.strip() for f in rows[0]] != ["time", "value"]:
        raise CliError(f"{source}: expected header 'time,value'", EXIT_IO)
    times, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise CliError(f"{source}:{lineno}: expected 2 fields, got {len(row)}", EXIT_IO)
        try:
            times.append(float(row[0]))
            values.append(float(row[1]))
        except ValueError as exc:
            raise CliError(f"{source}:{lineno}: {exc}", EXIT_IO) from exc
    try:
        return validate_path(times, values)
    except PathValidationError as exc:
        raise CliError(f"{source}: {exc}", EXIT_IO) from exc


def format_csv_series(p: SamplePath) -> str:
    lines = ["time,value"]
    lines.extend(f"{_fmt(t)},{_fmt(v)}" for t, v in zip(p.times, p.values))
    return "\n".join(lines) + "\n"


# -- compute ------------------------------------------------------------------


def _process_target(output):
    if output is not None and output != "-":
        out = Path(output)
        return out.with_name(out.stem + ".process.csv")
    return (_output_dir() or Path.cwd()) / "process.csv"


def cmd_compute(args) -> int:
    p = read_csv_series(args.input)
    doc = {"input": str(args.input), "n_samples": len(p)}
    if args.total_variation:
        doc["tv"] = total_variation(p)
        _write_text(args.output, json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    if args.c is None:
        raise CliError("--c is required (or use --total-variation)", EXIT_ARG)
    if not args.c > 0:
        raise CliError(
            f"c must be positive, got {args.c}; for the plain total variation use --total-variation",
            EXIT_ARG,
        )
    curve = truncvar_curve(p, args.c)
    doc["c"] = args.c
    doc["utv"] = float(curve.utv[-1])
    doc["dtv"] = float(curve.dtv[-1])
    doc["tv"] = float(curve.tv[-1])
    if args.emit_tube:
        tube = tube_functions(p, args.c)
        doc["tube"] = {
            "alpha0": tube.alpha0,
            "g0": tube.g0.tolist(),
            "g": tube.g.tolist(),
        }
    if args.emit_process:
        target = _process_target(args.output)
        lines = ["time,utv,dtv,tv"]
        lines.extend(
            ",".join(_fmt(x) for x in row)
            for row in zip(curve.times, curve.utv, curve.dtv, curve.tv)
        )
        _write_text(target, "\n".join(lines) + "\n")
        doc["process_csv"] = str(target)
    _write_text(args.output, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


# -- simulate -----------------------------------------------------------------


def _parse_params(items):
    params = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"--param expects key=value, got {item!r}", EXIT_ARG)
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise CliError(f"--param {key}: {exc}", EXIT_ARG) from exc
    return params


def cmd_simulate(args) -> int:
    try:
        spec = DiffusionSpec(args.family, _parse_params(args.param))
        grid = GridSpec(args.horizon, args.dt)
        seed = RngSeed(args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_ARG) from exc
    p = sample_diffusion_euler(spec, grid, seed)
    output = args.output
    if output is None and _output_dir() is not None:
        output = _output_dir() / f"{args.family}_seed{args.seed}.csv"
    _write_text(output, format_csv_series(p))
    stream = sys.stderr if output in (None, "-") else sys.stdout
    print(f"algorithm_id = {ALGORITHM_ID}", file=stream)
    return EXIT_OK


# -- constants ----------------------------------------------------------------


def cmd_constants(args) -> int:
    if not args.c > 0:
        raise CliError(f"c must be positive, got {args.c}", EXIT_ARG)
    for key, value in asy.constants(args.mu, args.c).items():
        print(f"{key} = {_fmt(value)}")
    return EXIT_OK


# -- experiment ---------------------------------------------------------------


def _load_config(args) -> ExperimentConfig:
    if args.config is None:
        doc = {}
    else:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliError(f"cannot read {args.config}: {exc}", EXIT_IO) from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"{args.config}: invalid JSON: {exc}", EXIT_IO) from exc
        if not isinstance(doc, dict):
            raise CliError(f"{args.config}: top level must be an object", EXIT_IO)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.n_paths is not None:
        doc["n_paths"] = args.n_paths
    try:
        return ExperimentConfig.from_dict(doc, args.kind) if doc else default_config(args.kind)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_ARG) from exc


def cmd_experiment(args) -> int:
    config = _load_config(args)
    try:
        report = run_experiment(config)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_ARG) from exc
    output = args.output
    if output is None and _output_dir() is not None:
        output = _output_dir() / f"{args.kind}_report.json"
    _write_text(output, report.to_json() + "\n")
    if args.samples_csv:
        buf = io.StringIO()
        report.write_samples_csv(buf)
        _write_text(args.samples_csv, buf.getvalue())
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for r in report.records:
        verdict = "PASS" if r.passed else "FAIL"
        print(f"{verdict} {r.name}: {r.estimate:.6g} vs {r.target:.6g} (tol {r.tolerance:.3g})",
              file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERDICT


# -- entry point --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; invalid values are ours to map
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="truncvar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="truncated variation of a time,value CSV")
    p.add_argument("input", help="CSV file with header time,value ('-' for stdin)")
    p.add_argument("--c", type=float, help="truncation threshold (> 0)")
    p.add_argument("--emit-process", action="store_true",
                   help="also write the utv/dtv/tv curves as CSV")
    p.add_argument("--emit-tube", action="store_true",
                   help="include the lazy tube functions in the output")
    p.add_argument("--total-variation", action="store_true",
                   help="compute the untruncated total variation instead")
    p.add_argument("--output", "-o", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("simulate", help="generate a sampled diffusion path")
    p.add_argument("--family", required=True, choices=("bm_drift", "ou", "bounded_sine"))
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="family parameter, repeatable (e.g. mu=0.5)")
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("constants", help="closed-form constants for BM with drift")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("experiment", help="run a validation experiment")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--config", help="JSON document overlaying the default config")
    p.add_argument("--output", "-o", help="report JSON path (default stdout)")
    p.add_argument("--samples-csv", help="write per-path samples to this CSV")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-paths", type=int)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"truncvar {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
