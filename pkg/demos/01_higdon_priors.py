"""
Lengthscale priors on the Higdon function
=========================================

Ten Latin hypercube points on [0, 10], one chain per prior and proposal,
and the resulting predictive accuracy on 100 fresh points.  Inputs stay in
their native units here, so ``theta`` is measured in squared input units.
"""

# %%
# Training and test designs.
import numpy as np

from gpprior import (
    Dataset,
    PriorSpec,
    ProposalSpec,
    get_function,
    latin_hypercube,
    posterior_predict,
    run_chain,
    scale_to_domain,
    score,
)

higdon = get_function("higdon")
X = scale_to_domain(latin_hypercube(10, 1, seed=1), higdon.bounds)
Xtest = np.linspace(0, 10, 100)[:, None]
data = Dataset.from_arrays(X, higdon(X), bounds=higdon.bounds)
truth = higdon(Xtest)

# %%
# One chain of 10000 sweeps per combination.  The initial lengthscale is the
# sample standard deviation of the inputs, about 3 here.  That is outside the
# support of Beta(1, 1), so under the uniform proposal the Beta chain can
# never reach (0, 1) and stays where it started.
proposals = [ProposalSpec("uniform", 2.0), ProposalSpec("lognormal", 0.5)]
priors = ["beta", "log_normal", "inverse_gamma", "jeffreys", "gamma", "half_cauchy"]

print(f"{'prior':>14} {'proposal':>14} {'theta0':>7} {'median theta':>12} "
      f"{'accept':>7} {'rmse/sd':>8} {'picr':>5}")
for proposal in proposals:
    for name in priors:
        chain = run_chain(data, PriorSpec(name), proposal, n_iterations=10_000, seed=0)
        pred = posterior_predict(chain, data, Xtest, full_covariance=False)
        rep = score(truth, pred.mean, pred.variance)
        kept = chain.samples[3001:, 0]
        print(f"{name:>14} {proposal.label():>14} {chain.samples[0, 0]:7.2f} "
              f"{np.median(kept):12.3g} {chain.acceptance_rate[0]:7.3f} "
              f"{rep.rmse / truth.std():8.3f} {rep.picr:5.2f}")

# %%
# The predictive curve for one chain, printed coarsely.  The mean is on the
# raw output scale; the band is +/- two standard deviations.
chain = run_chain(data, PriorSpec("log_normal"), proposals[0], n_iterations=10_000, seed=0)
pred = posterior_predict(chain, data, Xtest, full_covariance=False)
sd = np.sqrt(pred.variance)
for i in range(0, 100, 11):
    print(f"x={Xtest[i, 0]:5.2f}  f={truth[i]:+.3f}  mean={pred.mean[i]:+.3f}  +/-{2 * sd[i]:.3f}")
