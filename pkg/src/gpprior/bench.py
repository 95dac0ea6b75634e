"""Repeated-design benchmark of prior/proposal combinations.

One *configuration* is a (target, prior, proposal) triple.  Every repetition
draws fresh Latin hypercube training and test designs (or a fresh split of
an ingested dataset), runs one chain, predicts and scores.  Rows are appended
to ``results.csv`` as soon as they are complete and in canonical order, so
an interrupted run leaves a valid prefix.
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .benchfuncs import get_function, latin_hypercube, read_table, scale_to_domain
from .gp import Dataset, GPConfig
from .metrics import score
from .priors import PRIOR_KINDS, PriorSpec, parse_prior
from .proposals import PROPOSAL_KINDS, parse_proposal
from .sampler import posterior_predict, run_chain

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "RESULT_FIELDS",
    "SUMMARY_FIELDS",
    "WORKERS_ENV",
    "target_dimension",
    "run_experiment",
    "run_repetition",
    "summarize",
    "quartiles",
    "read_results",
    "write_summary",
    "write_trace",
]

logger = logging.getLogger(__name__)

WORKERS_ENV = "GPPRIOR_WORKERS"
ALL_TARGETS = ("higdon", "hartmann3", "colville", "borehole")


@dataclass
class ExperimentConfig:
    """Settings for a batch of repetitions.

    ``targets``, ``priors`` and ``proposals`` are lists; every combination
    is one configuration.  ``None`` sizes resolve per target dimension ``d``:
    ``n_train = 10 d``, ``n_test = 100 d`` and ``iterations = 10000 d``.
    Priors are strings accepted by :func:`~gpprior.priors.parse_prior`,
    proposals strings accepted by :func:`~gpprior.proposals.parse_proposal`
    (a bare kind gets the dimension-dependent default step).
    Dataset targets are ``"path.csv"`` or ``"path.csv:k"`` for ``k`` input
    columns (default 1).
    """

    targets: list = field(default_factory=lambda: ["higdon"])
    priors: list = field(default_factory=lambda: list(PRIOR_KINDS))
    proposals: list = field(default_factory=lambda: list(PROPOSAL_KINDS))
    n_train: int | None = None
    n_test: int | None = None
    iterations: int | None = None
    burn_in_fraction: float = 0.3
    repetitions: int = 100
    base_seed: int = 0
    scale_inputs: bool = True
    thinning: int = 1
    jitter: float = 1e-8
    trace: bool = False
    output_dir: str = "results"

    def __post_init__(self):
        for name in ("targets", "priors", "proposals"):
            value = getattr(self, name)
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            setattr(self, name, list(value))
        if self.targets == ["all"]:
            self.targets = list(ALL_TARGETS)
        if self.priors == ["all"]:
            self.priors = list(PRIOR_KINDS)
        if self.proposals == ["all"]:
            self.proposals = list(PROPOSAL_KINDS)
        if not (self.targets and self.priors and self.proposals):
            raise ValueError("targets, priors and proposals must be non-empty")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not 0 <= self.burn_in_fraction < 1:
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        for size in ("n_train", "n_test", "iterations"):
            v = getattr(self, size)
            if v is not None and v < 1:
                raise ValueError(f"{size} must be >= 1")
        # fail early on unparseable specs
        for p in self.priors:
            parse_prior(p)
        for t in self.targets:
            d = target_dimension(t)
            for q in self.proposals:
                parse_proposal(q, d)

    def configurations(self):
        return list(itertools.product(self.targets, self.priors, self.proposals))

    def sizes(self, d):
        return (
            self.n_train or 10 * d,
            self.n_test or 100 * d,
            self.iterations or 10000 * d,
        )


def _split_target(target):
    path, sep, cols = target.rpartition(":")
    if sep and cols.isdigit() and path:
        return path, int(cols)
    return target, 1


def _is_dataset(target):
    return _split_target(target)[0].lower().endswith(".csv")


def target_dimension(target):
    if _is_dataset(target):
        return _split_target(target)[1]
    return get_function(target).dimension


RESULT_FIELDS = (
    "repetition",
    "target",
    "prior",
    "proposal",
    "status",
    "rmse",
    "crps",
    "picr",
    "acceptance",
    "n_train",
    "n_test",
    "iterations",
    "seed",
    "seconds",
)


@dataclass
class ResultRow:
    repetition: int
    target: str
    prior: str
    proposal: str
    status: str
    rmse: float
    crps: float
    picr: float
    acceptance: tuple
    n_train: int
    n_test: int
    iterations: int
    seed: int
    seconds: float

    def as_record(self):
        rec = {f.name: getattr(self, f.name) for f in fields(self)}
        rec["acceptance"] = ";".join(f"{a:.6f}" for a in self.acceptance)
        for k in ("rmse", "crps", "picr"):
            rec[k] = repr(float(rec[k]))
        rec["seconds"] = f"{self.seconds:.3f}"
        return rec

    @classmethod
    def from_record(cls, rec):
        acc = tuple(float(a) for a in rec["acceptance"].split(";") if a)
        return cls(
            int(rec["repetition"]),
            rec["target"],
            rec["prior"],
            rec["proposal"],
            rec["status"],
            float(rec["rmse"]),
            float(rec["crps"]),
            float(rec["picr"]),
            acc,
            int(rec["n_train"]),
            int(rec["n_test"]),
            int(rec["iterations"]),
            int(rec["seed"]),
            float(rec["seconds"]),
        )


def _designs(target, config, seed):
    """Raw training/test inputs and outputs plus the input bounds."""
    ss = np.random.SeedSequence(seed)
    train_seed, test_seed = (int(s.generate_state(1)[0]) for s in ss.spawn(2))
    if _is_dataset(target):
        path, k = _split_target(target)
        _, X, y = read_table(path, k)
        n_train, n_test, _ = config.sizes(k)
        order = np.random.default_rng(train_seed).permutation(len(y))
        if len(y) < n_train + n_test:
            # small files: keep the requested training size if possible, test on the rest
            n_train = min(n_train, max(len(y) // 2, 2))
        train, test = order[:n_train], order[n_train : n_train + n_test]
        bounds = np.column_stack([X.min(axis=0), X.max(axis=0)])
        return X[train], y[train], X[test], y[test], bounds
    fn = get_function(target)
    n_train, n_test, _ = config.sizes(fn.dimension)
    Xtr = scale_to_domain(latin_hypercube(n_train, fn.dimension, train_seed), fn.bounds)
    Xte = scale_to_domain(latin_hypercube(n_test, fn.dimension, test_seed), fn.bounds)
    return Xtr, fn(Xtr), Xte, fn(Xte), fn.bounds_array


def run_repetition(target, prior, proposal, config, repetition, trace_path=None):
    """Run one repetition of one configuration; failures become a status string."""
    seed = config.base_seed + repetition
    d = target_dimension(target)
    n_train, n_test, iterations = config.sizes(d)
    start = time.perf_counter()
    nan = math.nan
    acceptance = ()
    try:
        Xtr, ytr, Xte, yte, bounds = _designs(target, config, seed)
        n_train, n_test = len(ytr), len(yte)
        dataset = Dataset.from_arrays(Xtr, ytr, bounds=bounds, scale_inputs=config.scale_inputs)
        gp_config = GPConfig(config.jitter)
        chain = run_chain(
            dataset,
            parse_prior(prior),
            parse_proposal(proposal, d),
            gp_config,
            n_iterations=iterations,
            seed=seed,
        )
        acceptance = tuple(float(a) for a in chain.acceptance_rate)
        if trace_path is not None:
            write_trace(chain, trace_path)
        summary = posterior_predict(
            chain,
            dataset,
            dataset.transform(Xte),
            gp_config,
            burn_in_fraction=config.burn_in_fraction,
            thinning=config.thinning,
            full_covariance=False,
        )
        rep = score(yte, summary.mean, summary.variance)
        status, rmse, crps, picr = "ok", rep.rmse, rep.crps, rep.picr
    except Exception as exc:  # recorded in the row; the batch continues
        logger.debug("repetition %d failed:\n%s", repetition, traceback.format_exc())
        status = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
        rmse = crps = picr = nan
    return ResultRow(
        repetition,
        target,
        prior,
        proposal,
        status,
        rmse,
        crps,
        picr,
        acceptance,
        n_train,
        n_test,
        iterations,
        seed,
        time.perf_counter() - start,
    )


def _task(args):
    # single-threaded BLAS per worker keeps parallel runs from oversubscribing
    return run_repetition(*args)


def _trace_name(index, repetition):
    return f"trace_{index:03d}_{repetition:03d}.csv"


def write_trace(chain, path):
    """One row per state: iteration, thetas, tau2, acceptance flags of that sweep."""
    d = chain.d
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["iteration"]
            + [f"theta_{i + 1}" for i in range(d)]
            + ["tau2"]
            + [f"accepted_{i + 1}" for i in range(d)]
        )
        for t in range(chain.n_iterations + 1):
            flags = chain.accepted[t - 1] if t > 0 else np.zeros(d, dtype=bool)
            w.writerow(
                [t]
                + [repr(float(v)) for v in chain.samples[t]]
                + [repr(float(chain.tau2[t]))]
                + [int(f) for f in flags]
            )


def _workers():
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def run_experiment(config, workers=None, progress=None):
    """Run every repetition of every configuration and persist the rows.

    Writes ``results.csv`` (and optionally ``trace_*.csv``) under
    ``config.output_dir`` and returns the rows in canonical order:
    configuration-major, then repetition.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    configs = config.configurations()
    tasks = []
    for index, (target, prior, proposal) in enumerate(configs):
        for rep in range(config.repetitions):
            trace = str(out / _trace_name(index, rep)) if config.trace else None
            tasks.append((target, prior, proposal, config, rep, trace))
    workers = workers or _workers()
    rows = []
    with open(out / "results.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_FIELDS)
        writer.writeheader()
        fh.flush()

        def emit(row):
            rows.append(row)
            writer.writerow(row.as_record())
            fh.flush()
            if progress is not None:
                progress(row, len(rows), len(tasks))

        if workers == 1:
            for task in tasks:
                emit(_task(task))
        else:
            with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker) as pool:
                # map() yields in submission order, so the file stays canonical
                for row in pool.map(_task, tasks, chunksize=1):
                    emit(row)
    return rows


def _init_worker():
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, "1")


def read_results(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [ResultRow.from_record(r) for r in csv.DictReader(fh)]


def quartiles(values):
    """Median and quartiles by the median-of-halves rule.

    The sorted sample is split into a lower and upper half, excluding the
    median itself when the count is odd; Q1 and Q3 are the medians of the
    halves.  A single value gives Q1 = median = Q3.
    """
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    if n == 0:
        raise ValueError("no values")
    med = float(np.median(v))
    if n == 1:
        return med, med, med
    half = n // 2
    lower, upper = v[:half], v[n - half :]
    return float(np.median(lower)), med, float(np.median(upper))


SUMMARY_FIELDS = (
    "target",
    "prior",
    "proposal",
    "metric",
    "count",
    "failed",
    "min",
    "q1",
    "median",
    "q3",
    "max",
)


def summarize(rows):
    """Box-plot statistics of rmse, crps and picr per configuration.

    Returns a list of dicts (one per configuration and metric) in order of
    first appearance.  Failed repetitions are counted but excluded.
    """
    if not rows:
        raise ValueError("no rows to summarize")
    groups = {}
    for row in rows:
        groups.setdefault((row.target, row.prior, row.proposal), []).append(row)
    out = []
    for (target, prior, proposal), members in groups.items():
        ok = [r for r in members if r.status == "ok"]
        for metric in ("rmse", "crps", "picr"):
            rec = dict(target=target, prior=prior, proposal=proposal, metric=metric,
                       count=len(ok), failed=len(members) - len(ok))
            if ok:
                vals = [getattr(r, metric) for r in ok]
                q1, med, q3 = quartiles(vals)
                rec.update(min=min(vals), q1=q1, median=med, q3=q3, max=max(vals))
            else:
                rec.update(min=math.nan, q1=math.nan, median=math.nan, q3=math.nan, max=math.nan)
            out.append(rec)
    return out


def write_summary(summary, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        for rec in summary:
            writer.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in rec.items()})


def with_overrides(config, **overrides):
    """Copy of ``config`` with the non-None ``overrides`` applied."""
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})
