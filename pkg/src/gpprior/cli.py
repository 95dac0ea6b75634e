"""Command-line entry point for the prior/proposal benchmark.

Examples
--------
Full grid at the default protocol sizes, 10 repetitions::

    gpprior-bench --target all --prior all --proposal all --reps 10 --out runs/grid

A config file holds ``key = value`` lines (``#`` starts a comment); flags
override it::

    gpprior-bench --config higdon.cfg --reps 2

Re-summarize a finished run::

    gpprior-bench --summarize runs/grid/results.csv
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .bench import (
    WORKERS_ENV,
    ExperimentConfig,
    read_results,
    run_experiment,
    summarize,
    write_summary,
)

log = logging.getLogger("gpprior")

# config-file key -> (ExperimentConfig field, converter)
_KEYS = {
    "target": ("targets", str),
    "targets": ("targets", str),
    "prior": ("priors", str),
    "priors": ("priors", str),
    "proposal": ("proposals", str),
    "proposals": ("proposals", str),
    "reps": ("repetitions", int),
    "repetitions": ("repetitions", int),
    "iters": ("iterations", int),
    "iterations": ("iterations", int),
    "seed": ("base_seed", int),
    "base_seed": ("base_seed", int),
    "out": ("output_dir", str),
    "output_dir": ("output_dir", str),
    "n_train": ("n_train", int),
    "n_test": ("n_test", int),
    "burn_in": ("burn_in_fraction", float),
    "burn_in_fraction": ("burn_in_fraction", float),
    "thinning": ("thinning", int),
    "jitter": ("jitter", float),
    "scale_inputs": ("scale_inputs", None),
    "trace": ("trace", None),
}


class ConfigError(ValueError):
    pass


def _bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config_file(path):
    """Parse a flat ``key = value`` file into ExperimentConfig keyword arguments."""
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep or key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: cannot parse {raw.strip()!r}")
        name, conv = _KEYS[key]
        value = value.strip()
        try:
            values[name] = _bool(value) if conv is None else conv(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}")
    return values


def build_parser():
    p = argparse.ArgumentParser(
        prog="gpprior-bench",
        description="Benchmark lengthscale priors and proposals for fully Bayesian GPs.",
    )
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--target", help="comma list of test functions or CSV paths (path.csv:k), or 'all'")
    p.add_argument("--prior", help="comma list of priors, e.g. 'gamma,jeffreys' or 'gamma:2,1', or 'all'")
    p.add_argument("--proposal", help="comma list of proposals, e.g. 'uniform,lognormal:0.3', or 'all'")
    p.add_argument("--reps", type=int, help="repetitions per configuration (default 100)")
    p.add_argument("--iters", type=int, help="MCMC sweeps per chain (default 10000*d)")
    p.add_argument("--n-train", type=int, help="training size (default 10*d)")
    p.add_argument("--n-test", type=int, help="test size (default 100*d)")
    p.add_argument("--burn-in", type=float, help="burn-in fraction (default 0.3)")
    p.add_argument("--thinning", type=int, help="keep every k-th post-burn-in sample (default 1)")
    p.add_argument("--seed", type=int, help="base seed; repetition r uses seed + r")
    p.add_argument("--out", help="output directory (default ./results)")
    p.add_argument(
        "--scale-inputs",
        type=_bool,
        metavar="BOOL",
        help="map inputs to the unit cube before fitting (default true)",
    )
    p.add_argument("--trace", action="store_true", default=None, help="write per-iteration trace files")
    p.add_argument("--summarize", metavar="RESULTS_CSV", help="only summarize an existing results file")
    p.add_argument("-q", "--quiet", action="store_true", help="no progress output")
    p.epilog = f"Worker processes: ${WORKERS_ENV} (default: number of CPUs)."
    return p


def config_from_args(args):
    values = read_config_file(args.config) if args.config else {}
    flags = {
        "targets": args.target,
        "priors": args.prior,
        "proposals": args.proposal,
        "repetitions": args.reps,
        "iterations": args.iters,
        "n_train": args.n_train,
        "n_test": args.n_test,
        "burn_in_fraction": args.burn_in,
        "thinning": args.thinning,
        "base_seed": args.seed,
        "output_dir": args.out,
        "scale_inputs": args.scale_inputs,
        "trace": args.trace,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")

    if args.summarize:
        try:
            rows = read_results(args.summarize)
            summary = summarize(rows)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        out = Path(args.summarize).with_name("summary.csv")
        write_summary(summary, out)
        log.info("wrote %s", out)
        return 0

    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    n_configs = len(config.configurations())
    log.info(
        "%d configuration(s) x %d repetition(s) -> %s",
        n_configs,
        config.repetitions,
        config.output_dir,
    )
    start = time.perf_counter()

    def progress(row, done, total):
        log.info(
            "[%d/%d] %s %s %s rep=%d %s rmse=%.4g (%.1fs)",
            done,
            total,
            row.target,
            row.prior,
            row.proposal,
            row.repetition,
            row.status,
            row.rmse,
            row.seconds,
        )

    rows = run_experiment(config, progress=None if args.quiet else progress)
    write_summary(summarize(rows), Path(config.output_dir) / "summary.csv")
    failed = sum(r.status != "ok" for r in rows)
    log.info(
        "done: %d rows (%d failed) in %.1fs", len(rows), failed, time.perf_counter() - start
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
