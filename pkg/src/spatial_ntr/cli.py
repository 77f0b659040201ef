"""Command-line front end: ``spatial-ntr <command> ...``.

Exit codes are 0 on success, 1 when an identity check fails, 2 for usage
or configuration errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .baseline import parse_baseline
from .errors import ConfigurationError, ConvergenceError, DomainError, UnsupportedFamilyError
from .families import parse_family
from .identities import SUITES, IdentityReport, batch_mean_se, mc_product_moment, moment_closed_form, run_identity_suite
from .marginal import sample_dataset
from .ocrp import sample_ocrp
from .partitions import composition_probability, distinct_permutations, eppf, ordered_eppf, parse_sizes
from .posterior import PosteriorSimulator, posterior_mean_survival, summarize
from .rng import draw_stream, map_draws

log = logging.getLogger("spatial_ntr")

EXIT_OK, EXIT_IDENTITY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

__all__ = ["RunConfig", "build_parser", "main", "main_exit"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved options shared by the commands."""

    family: object = None
    baseline: object = None
    seed: int | None = None
    output_format: str = "csv"
    tolerance_overrides: dict = field(default_factory=dict)
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise UsageError(f"--workers must be at least 1, got {self.workers}")
        if self.seed is not None and self.seed < 0:
            raise UsageError(f"--seed must be nonnegative, got {self.seed}")

    def require_seed(self, what):
        if self.seed is None:
            raise UsageError(f"{what} is stochastic and needs --seed")
        return self.seed


def _read_spec(text):
    """Spec text, or the contents of ``@path``."""
    if text and text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return fh.read()
    return text


def _config(args, output_format="csv"):
    overrides = {}
    for item in getattr(args, "tol", None) or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            overrides[name.strip()] = float(value)
        except ValueError as exc:
            raise UsageError(f"--tol {item!r}: {exc}") from exc
    return RunConfig(
        family=parse_family(_read_spec(args.family)),
        baseline=parse_baseline(_read_spec(getattr(args, "baseline", None))),
        seed=getattr(args, "seed", None),
        output_format=getattr(args, "format", None) or output_format,
        tolerance_overrides=overrides,
        workers=getattr(args, "workers", 1),
    )


def _fmt(x):
    return repr(float(x))


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, default=_json_default)


def _metadata(cfg, **extra):
    meta = {"seed": cfg.seed, "family": cfg.family.to_spec()}
    if cfg.baseline is not None:
        meta["baseline"] = cfg.baseline.to_spec()
    meta.update(extra)
    return {"meta": meta}


# -- commands -----------------------------------------------------------------------------


def cmd_eppf(args, out):
    cfg = _config(args)
    sizes = parse_sizes(args.sizes)
    n = sum(sizes)
    out.write(f"family: {cfg.family}\n")
    if args.ordered:
        out.write(f"ordered sizes m: {','.join(map(str, sizes))}\n")
        out.write(f"ordered_eppf: {_fmt(ordered_eppf(cfg.family, sizes))}\n")
        out.write(f"composition_probability: {_fmt(composition_probability(cfg.family, sizes))}\n")
        return EXIT_OK
    out.write(f"sizes: {','.join(map(str, sizes))} (n={n})\n")
    out.write(f"eppf: {_fmt(eppf(cfg.family, sizes))}\n")
    out.write("ordering,ordered_eppf,composition_probability\n")
    for m in distinct_permutations(sorted(sizes, reverse=True)):
        out.write(
            f"{'-'.join(map(str, m))},{_fmt(ordered_eppf(cfg.family, m))},"
            f"{_fmt(composition_probability(cfg.family, m))}\n"
        )
    return EXIT_OK


def _check_n(n, draws=1):
    if n < 1:
        raise UsageError(f"-n must be positive, got {n}")
    if draws < 1:
        raise UsageError(f"--draws must be positive, got {draws}")


def cmd_sample(args, out):
    cfg = _config(args)
    seed = cfg.require_seed("sample")
    _check_n(args.n, args.draws)
    records = map_draws(
        lambda i, rng: sample_dataset(cfg.family, cfg.baseline, args.n, rng, args.with_jumps).to_record(),
        seed, args.draws, cfg.workers,
    )
    out.write(_dumps(_metadata(cfg, n=args.n, draws=args.draws, with_jumps=args.with_jumps)) + "\n")
    for rec in records:
        out.write(_dumps({k: rec[k] for k in ("m", "times", "marks", "jumps")}) + "\n")
    return EXIT_OK


def cmd_sample_partition(args, out):
    cfg = _config(args)
    cfg.baseline = None
    seed = cfg.require_seed("sample-partition")
    _check_n(args.n, args.draws)
    parts = map_draws(lambda i, rng: sample_ocrp(cfg.family, args.n, rng), seed, args.draws, cfg.workers)
    out.write(_dumps(_metadata(cfg, n=args.n, draws=args.draws)) + "\n")
    for p in parts:
        out.write(_dumps({"m": list(p.m), "labels": list(p.labels)}) + "\n")
    return EXIT_OK


def read_data_csv(path):
    """Read a CSV with a ``time`` column and an optional ``mark`` column."""
    fh = sys.stdin if path == "-" else open(path, newline="", encoding="utf-8")
    try:
        rows = [line for line in fh if line.strip() and not line.lstrip().startswith("#")]
    finally:
        if fh is not sys.stdin:
            fh.close()
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or "time" not in [f.strip() for f in reader.fieldnames]:
        raise UsageError(f"{path}: the data CSV needs a 'time' column")
    times, marks = [], []
    for lineno, row in enumerate(reader, start=2):
        row = {k.strip(): (v or "").strip() for k, v in row.items() if k is not None}
        try:
            times.append(float(row["time"]))
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad time {row['time']!r}") from exc
        marks.append(row.get("mark") or None)
    return times, marks


def parse_grid(text):
    """``t0:t1:steps`` into ``steps`` equally spaced points."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid expects t0:t1:steps, got {text!r}")
    try:
        t0, t1, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--grid {text!r}: {exc}") from exc
    if steps < 1 or t0 < 0 or t1 < t0 or not np.isfinite(t1):
        raise UsageError(f"--grid needs 0 <= t0 <= t1 and steps >= 1, got {text!r}")
    return np.linspace(t0, t1, steps)


def cmd_posterior_survival(args, out):
    cfg = _config(args)
    grid = parse_grid(args.grid)
    times, marks = read_data_csv(args.data)
    summary = summarize(times, marks, decimals=args.decimals)
    mean = posterior_mean_survival(cfg.family, cfg.baseline, summary, grid).values
    columns = {"time": grid, "mean_survival": mean}
    extra = {"n": summary.n, "grid": args.grid}
    if args.simulate:
        seed = cfg.require_seed("posterior survival --simulate")
        horizon = float(grid[-1]) if args.horizon is None else args.horizon
        sim = PosteriorSimulator(cfg.family, cfg.baseline, summary, args.eps, horizon)
        draws = sim.survival_draws(grid, args.simulate, draw_stream(seed, 0))
        columns["mc_mean"] = draws.mean(axis=0)
        columns["mc_stderr"] = draws.std(axis=0, ddof=1) / np.sqrt(args.simulate) if args.simulate > 1 else np.full(grid.size, np.inf)
        extra.update(simulate=args.simulate, eps=args.eps, horizon=horizon,
                     truncation_mass_bound=sim.bound)
    names = list(columns)
    if cfg.output_format == "json":
        body = {"columns": {k: [float(x) for x in v] for k, v in columns.items()}}
        body.update(_metadata(cfg, **extra))
        out.write(_dumps(body) + "\n")
        return EXIT_OK
    out.write("# " + _dumps(_metadata(cfg, **extra)["meta"]) + "\n")
    out.write(",".join(names) + "\n")
    for i in range(grid.size):
        out.write(",".join(_fmt(columns[k][i]) for k in names) + "\n")
    return EXIT_OK


def cmd_moments(args, out):
    cfg = _config(args)
    cfg.baseline = None
    if args.n < 1:
        raise UsageError(f"-n must be positive, got {args.n}")
    orders = range(1, args.n + 1) if args.all_orders else [args.n]
    rows = []
    for idx, n in enumerate(orders):
        row = {"n": n, "closed_form": moment_closed_form(cfg.family, n)}
        if args.draws:
            seed = cfg.require_seed("moments --draws")
            mean, se = batch_mean_se(mc_product_moment(cfg.family, n, args.draws, draw_stream(seed, idx)))
            row.update(mc_mean=mean, mc_stderr=se)
        rows.append(row)
    if cfg.output_format == "json":
        body = {"rows": rows}
        body.update(_metadata(cfg, draws=args.draws))
        out.write(_dumps(body) + "\n")
        return EXIT_OK
    names = list(rows[0])
    out.write("# " + _dumps(_metadata(cfg, draws=args.draws)["meta"]) + "\n")
    out.write(",".join(names) + "\n")
    for row in rows:
        out.write(",".join(str(row[k]) if k == "n" else _fmt(row[k]) for k in names) + "\n")
    return EXIT_OK


def _apply_overrides(reports, overrides):
    if not overrides:
        return reports
    out = []
    for rep in reports:
        tol = next((v for k, v in overrides.items() if rep.name.startswith(k)), None)
        if tol is None:
            out.append(rep)
        else:
            out.append(IdentityReport(rep.name, rep.left, rep.right, tol, relative=rep.relative,
                                      method=rep.method, notes=(rep.notes + "; tolerance overridden").lstrip("; ")))
    return out


def format_report_table(reports):
    failed = sum(1 for rep in reports if not rep.passed)
    lines = [rep.row() for rep in reports]
    lines.append(f"{len(reports) - failed} passed, {failed} failed")
    return "\n".join(lines) + "\n"


def cmd_verify(args, out):
    cfg = _config(args)
    cfg.baseline = None
    seed = cfg.require_seed("verify")
    reports = run_identity_suite(cfg.family, args.suite, seed=seed, workers=cfg.workers)
    reports = _apply_overrides(reports, cfg.tolerance_overrides)
    doc = {"reports": [rep.to_dict() for rep in reports], "passed": all(rep.passed for rep in reports)}
    doc.update(_metadata(cfg, suite=args.suite))
    text = json.dumps(doc, sort_keys=True, indent=2, default=_json_default) + "\n"
    if args.json == "-":
        out.write(text)
    else:
        out.write(format_report_table(reports))
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    return EXIT_OK if doc["passed"] else EXIT_IDENTITY


# -- parser -------------------------------------------------------------------------------


def _add_common(p, baseline=False, seed=False):
    p.add_argument("--family", default="beta_process:theta=1",
                   help="family as JSON, name:key=val shorthand, or @file.json")
    if baseline:
        p.add_argument("--baseline", default="identity", help="baseline as JSON, identity, weibull or @file.json")
    if seed:
        p.add_argument("--seed", type=int, default=None, help="nonnegative integer seed")
    p.add_argument("--workers", type=int, default=1, help="worker threads for Monte Carlo")


def build_parser():
    parser = argparse.ArgumentParser(prog="spatial-ntr", description="Spatial neutral-to-the-right processes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eppf", help="partition probabilities for given block sizes")
    _add_common(p)
    p.add_argument("--sizes", required=True, help='block sizes, e.g. "3,1,1"')
    p.add_argument("--ordered", action="store_true", help="treat the sizes as a ranked composition")
    p.set_defaults(func=cmd_eppf)

    p = sub.add_parser("sample", help="simulate datasets from the marginal law (JSON lines)")
    _add_common(p, baseline=True, seed=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--draws", type=int, default=1)
    p.add_argument("--with-jumps", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sample-partition", help="simulate ordered partitions (JSON lines)")
    _add_common(p, seed=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--draws", type=int, default=1)
    p.set_defaults(func=cmd_sample_partition)

    p = sub.add_parser("posterior", help="posterior summaries")
    psub = p.add_subparsers(dest="posterior_command", required=True)
    q = psub.add_parser("survival", help="posterior mean survival curve (CSV)")
    _add_common(q, baseline=True, seed=True)
    q.add_argument("--data", required=True, help="CSV with columns time[,mark]; - for stdin")
    q.add_argument("--grid", required=True, help="t0:t1:steps")
    q.add_argument("--simulate", type=int, default=0, metavar="R", help="Monte Carlo realisations")
    q.add_argument("--eps", type=float, default=1e-6, help="truncation mass bound for simulation")
    q.add_argument("--horizon", type=float, default=None, help="simulation horizon (default: end of grid)")
    q.add_argument("--decimals", type=int, default=None, help="round data times before detecting ties")
    q.add_argument("--format", choices=["csv", "json"], default="csv")
    q.set_defaults(func=cmd_posterior_survival)

    p = sub.add_parser("moments", help="E[prod T_i] in closed form, optionally by Monte Carlo")
    _add_common(p, seed=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--draws", type=int, default=0)
    p.add_argument("--all-orders", action="store_true", help="report every order 1..n")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("verify", help="run identity checks")
    _add_common(p, seed=True)
    p.add_argument("--suite", choices=sorted(SUITES), default="default")
    p.add_argument("--json", default=None, metavar="PATH", help="write the JSON report to PATH (- for stdout)")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                   help="override the tolerance of checks whose name starts with NAME")
    p.set_defaults(func=cmd_verify)
    return parser


def _setup_logging():
    level = os.environ.get("NTR_LOG", "WARNING").upper()
    numeric = logging.getLevelName(level)
    logging.basicConfig(level=numeric if isinstance(numeric, int) else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None, out=None):
    """Entry point; returns the exit code."""
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = sys.stdout if out is None else out
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except (UsageError, ConfigurationError, DomainError, UnsupportedFamilyError, OSError) as exc:
        print(f"spatial-ntr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ArithmeticError) as exc:
        print(f"spatial-ntr: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out.write(buf.getvalue())
    return code


def main_exit():
    """Console-script wrapper that exits with :func:`main`'s code."""
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
