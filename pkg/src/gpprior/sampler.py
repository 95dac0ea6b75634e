"""Metropolis-within-Gibbs sampling of GP lengthscales.

Each iteration is one Gibbs sweep: components ``i = 0..d-1`` are updated in
order by a single Metropolis-Hastings step whose target is

    log p(theta) + profile log-likelihood(theta).

The scale ``tau2`` is not sampled; it is recomputed in closed form at every
stored state.  Posterior prediction averages the per-sample predictive moments
and adds the spread of the per-sample means (law of total variance).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .gp import (
    FactorizationFailure,
    GPConfig,
    as_theta,
    factorize,
    kernel_from_sqdiff,
    predictive_moments,
    profile_constant,
    quadratic_form,
)
from .priors import log_prior_density
from .proposals import log_correction, propose

__all__ = [
    "DegenerateDesign",
    "EmptyChain",
    "Chain",
    "PredictiveSummary",
    "initialize",
    "log_acceptance_ratio",
    "run_chain",
    "retained_indices",
    "posterior_predict",
]

logger = logging.getLogger(__name__)

# candidates beyond this are logged once per chain
_HUGE_LENGTHSCALE = 1e12


class DegenerateDesign(ValueError):
    """An input column has zero spread, so no positive initial lengthscale exists."""


class EmptyChain(ValueError):
    """No samples are left after burn-in and thinning."""


@dataclass
class Chain:
    """Output of :func:`run_chain`.

    ``samples[0]`` is the initial state; ``samples[t]`` the state after sweep
    ``t``.  ``accepted[t - 1, i]`` records whether component ``i`` moved
    during sweep ``t``.  ``tau2`` is NaN where it was not computed (failed
    factorization, or flat-likelihood mode).
    """

    samples: np.ndarray
    tau2: np.ndarray
    log_prior: np.ndarray
    log_likelihood: np.ndarray
    accepted: np.ndarray
    n_iterations: int
    seed: int

    @property
    def accept_counts(self):
        return self.accepted.sum(axis=0)

    @property
    def acceptance_rate(self):
        return self.accept_counts / max(self.n_iterations, 1)

    @property
    def d(self):
        return self.samples.shape[1]


@dataclass
class PredictiveSummary:
    """Posterior-predictive moments aggregated over retained samples.

    With ``full_covariance=False`` in :func:`posterior_predict`, the three
    covariance fields hold only their diagonals (length-m vectors).
    """

    mean: np.ndarray
    covariance: np.ndarray
    aleatoric: np.ndarray
    epistemic: np.ndarray
    burn_in: int
    n_samples: int

    @property
    def variance(self):
        if self.covariance.ndim == 2:
            return np.diag(self.covariance).copy()
        return self.covariance


def initialize(dataset):
    """Start each lengthscale at the sample standard deviation of its column."""
    if dataset.n < 2:
        raise DegenerateDesign("need at least two points to initialize lengthscales")
    sd = np.std(dataset.inputs, axis=0, ddof=1)
    if np.any(~(sd > 0)):
        cols = np.flatnonzero(~(sd > 0)).tolist()
        raise DegenerateDesign(f"constant input column(s) {cols}")
    return sd


def log_acceptance_ratio(log_target_candidate, log_target_current, log_correction_term):
    """``log alpha`` for one Metropolis-Hastings step.

    Zero prior mass at both states (``-inf - -inf``) rejects; a finite
    candidate from a zero-mass current state is always accepted.
    """
    if log_target_candidate == -math.inf or log_correction_term == -math.inf:
        return -math.inf
    if log_target_current == -math.inf:
        return 0.0
    return min(0.0, log_target_candidate - log_target_current + log_correction_term)


class _Target:
    """Evaluates log prior, profile log-likelihood and tau2 at one state."""

    def __init__(self, dataset, prior, config, flat_likelihood):
        self.dataset = dataset
        self.prior = prior
        self.config = config
        self.flat = flat_likelihood
        self.sqdiff = dataset.sqdiff
        self.n = dataset.n
        self.const = profile_constant(dataset.n)
        self.diag = np.diag_indices(dataset.n)

    def factor(self, theta):
        K = kernel_from_sqdiff(self.sqdiff, theta)
        K[self.diag] += self.config.jitter
        return factorize(K)

    def __call__(self, theta):
        """Return ``(log_prior, log_likelihood, tau2)``; -inf marks rejection."""
        factor = None
        if self.prior.kind == "jeffreys":
            try:
                factor = self.factor(theta)
            except FactorizationFailure:
                return -math.inf, -math.inf, math.nan
        log_prior = log_prior_density(
            self.prior, theta, self.dataset, self.config, factor=factor
        )
        if self.flat:
            return log_prior, 0.0, math.nan
        if log_prior == -math.inf:
            # likelihood is irrelevant to the decision
            return log_prior, math.nan, math.nan
        return (log_prior,) + self.likelihood(theta, factor)

    def likelihood(self, theta, factor=None):
        try:
            if factor is None:
                factor = self.factor(theta)
        except FactorizationFailure:
            return -math.inf, math.nan
        q = quadratic_form(self.dataset, factor)
        if not q > 0:
            return -math.inf, math.nan
        ll = self.const - 0.5 * self.n * math.log(q) - 0.5 * factor.log_determinant
        return ll, q / self.n


def run_chain(
    dataset,
    prior,
    proposal,
    config=None,
    n_iterations=1000,
    seed=0,
    theta0=None,
    flat_likelihood=False,
):
    """Run ``n_iterations`` Metropolis-within-Gibbs sweeps.

    Parameters
    ----------
    dataset : Dataset
    prior : PriorSpec
    proposal : ProposalSpec
    config : GPConfig, optional
    n_iterations : int
        Number of full sweeps ``N``; the chain stores ``N + 1`` states.
    seed : int
        Seed for ``numpy.random.default_rng``; the chain is a deterministic
        function of the inputs and this seed.
    theta0 : array_like, optional
        Starting point; defaults to :func:`initialize`.
    flat_likelihood : bool
        Replace the likelihood by a constant so the chain targets the prior.
        Used to validate the proposal corrections.

    Returns
    -------
    Chain
    """
    config = config or GPConfig()
    if n_iterations < 1:
        raise ValueError("n_iterations must be >= 1")
    theta = initialize(dataset) if theta0 is None else as_theta(theta0, dataset.d).copy()
    d = theta.shape[0]
    rng = np.random.default_rng(seed)
    target = _Target(dataset, prior, config, flat_likelihood)

    samples = np.empty((n_iterations + 1, d))
    tau2 = np.empty(n_iterations + 1)
    log_prior = np.empty(n_iterations + 1)
    log_lik = np.empty(n_iterations + 1)
    accepted = np.zeros((n_iterations, d), dtype=bool)

    lp, ll, t2 = target(theta)
    if lp == -math.inf and not flat_likelihood:
        # still record the likelihood so traces of a locked chain are informative
        ll, t2 = target.likelihood(theta)
    samples[0], tau2[0], log_prior[0], log_lik[0] = theta, t2, lp, ll
    cur_target = lp + ll if lp > -math.inf else -math.inf
    warned = False

    for t in range(1, n_iterations + 1):
        for i in range(d):
            old = theta[i]
            new = propose(proposal, old, rng)
            if new > _HUGE_LENGTHSCALE and not warned:
                logger.warning("lengthscale candidate %.3g in dimension %d", new, i)
                warned = True
            corr = log_correction(proposal, old, new)
            cand = theta.copy()
            cand[i] = new
            c_lp, c_ll, c_t2 = target(cand)
            c_target = c_lp + c_ll if c_lp > -math.inf else -math.inf
            log_alpha = log_acceptance_ratio(c_target, cur_target, corr)
            u = rng.random()
            if u > 0.0 and math.log(u) < log_alpha:
                theta = cand
                lp, ll, t2, cur_target = c_lp, c_ll, c_t2, c_target
                accepted[t - 1, i] = True
        samples[t], tau2[t], log_prior[t], log_lik[t] = theta, t2, lp, ll

    return Chain(samples, tau2, log_prior, log_lik, accepted, n_iterations, seed)


def retained_indices(n_iterations, burn_in_fraction=0.3, thinning=1):
    """Indices into ``Chain.samples`` kept for prediction.

    The first ``B = floor(burn_in_fraction * N)`` sweeps are discarded, so
    states ``B + 1 .. N`` remain, then every ``thinning``-th is kept.
    """
    if not 0 <= burn_in_fraction < 1:
        raise ValueError("burn_in_fraction must lie in [0, 1)")
    if thinning < 1:
        raise ValueError("thinning must be >= 1")
    burn_in = int(math.floor(burn_in_fraction * n_iterations))
    return burn_in, np.arange(burn_in + 1, n_iterations + 1)[::thinning]


def _runs(samples):
    """Collapse consecutive identical rows into (row, multiplicity) pairs."""
    if len(samples) == 0:
        return []
    change = np.any(samples[1:] != samples[:-1], axis=1)
    starts = np.concatenate([[0], np.flatnonzero(change) + 1])
    counts = np.diff(np.concatenate([starts, [len(samples)]]))
    return list(zip(samples[starts], counts))


def posterior_predict(
    chain,
    dataset,
    Xnew,
    config=None,
    burn_in_fraction=0.3,
    thinning=1,
    full_covariance=True,
):
    """Aggregate predictive moments over the retained chain states.

    ``Xnew`` must be in the dataset's coordinates (see
    :meth:`Dataset.transform`).  The returned mean is on the raw output
    scale.  Repeated consecutive states are evaluated once and weighted by
    their multiplicity, which leaves the averages unchanged.
    """
    config = config or GPConfig()
    burn_in, idx = retained_indices(chain.n_iterations, burn_in_fraction, thinning)
    if idx.size == 0:
        raise EmptyChain(
            f"no samples left (N={chain.n_iterations}, burn-in={burn_in}, thinning={thinning})"
        )
    Xnew = np.atleast_2d(np.asarray(Xnew, dtype=float))
    m = Xnew.shape[0]
    shape = (m, m) if full_covariance else (m,)
    mean = np.zeros(m)
    m2 = np.zeros(shape)
    aleatoric = np.zeros(shape)
    total = 0
    for theta, w in _runs(chain.samples[idx]):
        pm = predictive_moments(dataset, theta, Xnew, config, full_covariance=full_covariance)
        total += w
        delta = pm.mean - mean
        mean += delta * (w / total)
        if full_covariance:
            m2 += w * np.outer(delta, pm.mean - mean)
        else:
            m2 += w * delta * (pm.mean - mean)
        aleatoric += w * pm.covariance
    aleatoric /= total
    epistemic = m2 / total
    if full_covariance:
        epistemic = 0.5 * (epistemic + epistemic.T)
    covariance = aleatoric + epistemic
    return PredictiveSummary(
        mean + dataset.output_offset, covariance, aleatoric, epistemic, burn_in, int(total)
    )
