"""Point and distributional scores for Gaussian predictions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

__all__ = ["Z975", "ScoreReport", "crps_gaussian", "score"]

Z975 = 1.959963985
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class ScoreReport:
    rmse: float
    crps: float
    picr: float
    n_test: int


def crps_gaussian(y, mu, sigma):
    """Closed-form CRPS of ``N(mu, sigma^2)`` at observation ``y``, elementwise.

    Reduces to ``|y - mu|`` where ``sigma == 0``.
    """
    y, mu, sigma = np.broadcast_arrays(
        np.asarray(y, float), np.asarray(mu, float), np.asarray(sigma, float)
    )
    scalar = y.ndim == 0
    y, mu, sigma = (np.atleast_1d(a) for a in (y, mu, sigma))
    err = y - mu
    out = np.abs(err).astype(float)
    pos = sigma > 0
    s = sigma[pos]
    e = err[pos]
    with np.errstate(over="ignore"):
        z = e / s
        pdf = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    # sigma * z written as err so a subnormal sigma cannot produce inf * 0
    out[pos] = 2 * s * pdf + e * (2 * ndtr(z) - 1) - s * _INV_SQRT_PI
    return float(out[0]) if scalar else out


def score(truth, mean, variance):
    """RMSE, mean Gaussian CRPS and 95% interval coverage of a prediction."""
    truth = np.asarray(truth, dtype=float).reshape(-1)
    mean = np.asarray(mean, dtype=float).reshape(-1)
    variance = np.asarray(variance, dtype=float).reshape(-1)
    if not truth.shape == mean.shape == variance.shape:
        raise ValueError(
            f"length mismatch: truth {truth.size}, mean {mean.size}, variance {variance.size}"
        )
    if truth.size == 0:
        raise ValueError("nothing to score")
    if np.any(variance < 0):
        raise ValueError("negative predictive variance")
    sd = np.sqrt(variance)
    err = truth - mean
    rmse = float(np.sqrt(np.mean(err**2)))
    crps = float(np.mean(crps_gaussian(truth, mean, sd)))
    # sd == 0 gives a zero-width interval, covered only by an exact hit
    covered = np.abs(err) <= Z975 * sd
    picr = float(np.mean(covered))
    return ScoreReport(rmse, crps, picr, int(truth.size))
