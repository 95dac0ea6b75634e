"""Designs, synthetic test functions and CSV dataset ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .gp import Dataset

__all__ = [
    "MalformedRow",
    "NonNumericField",
    "TooFewColumns",
    "TestFunction",
    "Design",
    "TEST_FUNCTIONS",
    "get_function",
    "latin_hypercube",
    "scale_to_domain",
    "scale_to_unit",
    "evaluate",
    "higdon",
    "hartmann3",
    "colville",
    "borehole",
    "load_dataset",
    "read_table",
]


class MalformedRow(ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NonNumericField(MalformedRow):
    pass


class TooFewColumns(ValueError):
    pass


def higdon(x):
    x = np.asarray(x, dtype=float)[..., 0]
    return np.sin(2 * np.pi * x / 10) + 0.2 * np.sin(2 * np.pi * x / 2.5)


HARTMANN3_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
HARTMANN3_A = np.array(
    [
        [3.0, 10, 30],
        [0.1, 10, 35],
        [3.0, 10, 30],
        [0.1, 10, 35],
    ]
)
HARTMANN3_P = 1e-4 * np.array(
    [
        [3689, 1170, 2673],
        [4699, 4387, 7470],
        [1091, 8732, 5547],
        [381, 5743, 8828],
    ]
)


def hartmann3(x):
    x = np.asarray(x, dtype=float)
    inner = np.sum(HARTMANN3_A * (x[..., None, :] - HARTMANN3_P) ** 2, axis=-1)
    return -np.sum(HARTMANN3_ALPHA * np.exp(-inner), axis=-1)


def colville(x):
    x = np.asarray(x, dtype=float)
    x1, x2, x3, x4 = (x[..., i] for i in range(4))
    return (
        100 * (x1**2 - x2) ** 2
        + (x1 - 1) ** 2
        + (x3 - 1) ** 2
        + 90 * (x3**2 - x4) ** 2
        + 10.1 * ((x2 - 1) ** 2 + (x4 - 1) ** 2)
        + 19.8 * (x2 - 1) * (x4 - 1)
    )


def borehole(x):
    """Water flow through a borehole.

    Inputs in order: r_w, r, T_u, H_u, T_l, H_l, L, K_w.
    """
    x = np.asarray(x, dtype=float)
    rw, r, Tu, Hu, Tl, Hl, L, Kw = (x[..., i] for i in range(8))
    log_ratio = np.log(r / rw)
    return (2 * np.pi * Tu * (Hu - Hl)) / (
        log_ratio * (1 + 2 * L * Tu / (log_ratio * rw**2 * Kw) + Tu / Tl)
    )


@dataclass(frozen=True)
class TestFunction:
    name: str
    dimension: int
    bounds: tuple
    func: Callable

    __test__ = False  # not a pytest class

    def __call__(self, x):
        return self.func(x)

    @property
    def bounds_array(self):
        return np.array(self.bounds, dtype=float)


TEST_FUNCTIONS = {
    "higdon": TestFunction("higdon", 1, ((0.0, 10.0),), higdon),
    "hartmann3": TestFunction("hartmann3", 3, ((0.0, 1.0),) * 3, hartmann3),
    "colville": TestFunction("colville", 4, ((-10.0, 10.0),) * 4, colville),
    "borehole": TestFunction(
        "borehole",
        8,
        (
            (0.05, 0.15),
            (100.0, 50000.0),
            (63070.0, 115600.0),
            (990.0, 1110.0),
            (63.1, 116.0),
            (700.0, 820.0),
            (1120.0, 1680.0),
            (9855.0, 12045.0),
        ),
        borehole,
    ),
}


def get_function(name):
    key = name.lower().replace("-", "").replace("_", "")
    if key == "hartmann":
        key = "hartmann3"
    try:
        return TEST_FUNCTIONS[key]
    except KeyError:
        raise ValueError(f"unknown test function {name!r}; choose from {sorted(TEST_FUNCTIONS)}")


def evaluate(fn, x):
    """Evaluate ``fn`` at one point (returns float) or at the rows of a matrix."""
    if isinstance(fn, str):
        fn = get_function(fn)
    x = np.asarray(x, dtype=float)
    out = fn(x)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class Design:
    points: np.ndarray
    seed: int


def latin_hypercube(n, d, seed):
    """Random Latin hypercube on ``[0, 1)^d``: one point per stratum per column."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    sampler = qmc.LatinHypercube(d=d, scramble=True, seed=np.random.default_rng(seed))
    return Design(sampler.random(n), seed)


def _check_bounds(bounds):
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2:
        raise ValueError("bounds must be a sequence of (low, high) pairs")
    if not np.all(np.isfinite(bounds)) or np.any(bounds[:, 0] >= bounds[:, 1]):
        raise ValueError("bounds must be finite with low < high")
    return bounds


def scale_to_domain(design, bounds):
    points = design.points if isinstance(design, Design) else np.asarray(design, dtype=float)
    bounds = _check_bounds(bounds)
    return bounds[:, 0] + np.atleast_2d(points) * (bounds[:, 1] - bounds[:, 0])


def scale_to_unit(X, bounds):
    bounds = _check_bounds(bounds)
    return (np.atleast_2d(np.asarray(X, dtype=float)) - bounds[:, 0]) / (
        bounds[:, 1] - bounds[:, 0]
    )


def read_table(path, input_columns):
    """Read a comma-delimited file with one header row into ``(header, X, y)``."""
    if input_columns < 1:
        raise ValueError("input_columns must be >= 1")
    need = input_columns + 1
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TooFewColumns(f"{path} is empty")
        if len(header) < need:
            raise TooFewColumns(
                f"{path} has {len(header)} columns, need {need} ({input_columns} inputs + 1 output)"
            )
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header) or any(not c.strip() for c in row[:need]):
                raise MalformedRow(line, f"expected {len(header)} fields, got {row!r}")
            try:
                values = [float(c) for c in row[:need]]
            except ValueError:
                raise NonNumericField(line, f"non-numeric field in {row[:need]!r}")
            if not all(math.isfinite(v) for v in values):
                raise NonNumericField(line, f"non-finite field in {row[:need]!r}")
            rows.append(values)
    if not rows:
        raise MalformedRow(2, "no data rows")
    data = np.array(rows)
    return header[:need], data[:, :input_columns], data[:, input_columns]


def load_dataset(path, input_columns, scale_inputs=False):
    """Load a CSV file into a centered :class:`~gpprior.gp.Dataset`.

    The first ``input_columns`` columns are inputs, the next one is the
    output; bounds are the per-column min and max.
    """
    _, X, y = read_table(path, input_columns)
    return Dataset.from_arrays(X, y, scale_inputs=scale_inputs)
