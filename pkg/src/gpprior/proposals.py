"""Positive random-walk proposals for a single lengthscale component."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import log_ndtr, ndtri_exp

__all__ = [
    "PROPOSAL_KINDS",
    "ProposalSpec",
    "parse_proposal",
    "default_proposal",
    "propose",
    "log_correction",
]

PROPOSAL_KINDS = ("uniform", "lognormal")

_ALIASES = {
    "multiplicative_uniform": "uniform",
    "unif": "uniform",
    "log_gaussian": "lognormal",
    "loggaussian": "lognormal",
    "log_normal": "lognormal",
    "normal": "lognormal",
}


@dataclass(frozen=True)
class ProposalSpec:
    """Proposal kernel for one component.

    ``uniform``: ``theta* ~ Unif(theta / step, step * theta)`` with ``step > 1``.
    ``lognormal``: ``log theta* ~ N(log theta, step**2)`` truncated so that
    ``theta* >= lower_bound``.
    """

    kind: str
    step: float
    lower_bound: float = 1e-10

    def __post_init__(self):
        kind = self.kind.lower().replace("-", "_")
        kind = _ALIASES.get(kind, kind)
        if kind not in PROPOSAL_KINDS:
            raise ValueError(f"unknown proposal {self.kind!r}; choose from {PROPOSAL_KINDS}")
        step = float(self.step)
        if kind == "uniform" and not step > 1:
            raise ValueError(f"uniform proposal needs step u > 1, got {step}")
        if kind == "lognormal" and not step > 0:
            raise ValueError(f"lognormal proposal needs sigma > 0, got {step}")
        if not self.lower_bound > 0:
            raise ValueError("lower_bound must be positive")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "lower_bound", float(self.lower_bound))

    def label(self):
        return f"{self.kind}({self.step:g})"


def default_proposal(kind, d):
    """Step sizes used throughout the benchmarks: wider steps for d <= 4."""
    kind = ProposalSpec(kind, 2.0 if kind == "uniform" else 0.5).kind
    if kind == "uniform":
        return ProposalSpec(kind, 2.0 if d <= 4 else 1.5)
    return ProposalSpec(kind, 0.5 if d <= 4 else 0.1)


def parse_proposal(text, d):
    """Parse ``"uniform"``, ``"uniform:1.5"`` or ``"lognormal:0.3"``."""
    kind, _, rest = text.strip().partition(":")
    spec = default_proposal(kind, d)
    if rest.strip():
        spec = ProposalSpec(spec.kind, float(rest))
    return spec


def propose(spec, current, rng):
    """Draw a candidate from ``q(. | current)`` using a numpy ``Generator``."""
    if spec.kind == "uniform":
        u = spec.step
        return rng.uniform(current / u, current * u)
    center = math.log(current)
    floor = math.log(spec.lower_bound)
    sigma = spec.step
    a = (floor - center) / sigma
    if a < 0.0:
        # rejection; acceptance probability >= 1/2
        while True:
            z = center + sigma * rng.standard_normal()
            if z >= floor:
                return math.exp(z)
    # current near or below the floor: inverse-CDF on the survival function, P(Z > z) = v P(Z > a)
    v = 1.0 - rng.random()
    z = -float(ndtri_exp(math.log(v) + log_ndtr(-a)))
    return math.exp(max(center + sigma * z, floor))


def _log_normalizer(spec, center):
    return float(log_ndtr((center - math.log(spec.lower_bound)) / spec.step))


def log_correction(spec, current, candidate):
    """``log q(current | candidate) - log q(candidate | current)``."""
    if not (current > 0 and candidate > 0):
        return -math.inf
    if spec.kind == "uniform":
        u = spec.step
        # supports are symmetric: b in [a/u, au] iff a in [b/u, bu]
        ratio = candidate / current
        if ratio < 1.0 / u * (1 - 1e-12) or ratio > u * (1 + 1e-12):
            return -math.inf
        return math.log(current) - math.log(candidate)
    if current < spec.lower_bound or candidate < spec.lower_bound:
        return -math.inf
    lc, lk = math.log(current), math.log(candidate)
    return (lk - lc) + _log_normalizer(spec, lc) - _log_normalizer(spec, lk)
