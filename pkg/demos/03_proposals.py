"""
Proposal kernels and their corrections
======================================

With the likelihood switched off, a correct Metropolis-Hastings kernel
samples the prior.  This checks both proposals against independent draws.
"""

# %%
import numpy as np
from scipy import stats

from gpprior import Dataset, PriorSpec, ProposalSpec, run_chain
from gpprior.proposals import log_correction, propose

rng = np.random.default_rng(0)
uniform, lognormal = ProposalSpec("uniform", 2.0), ProposalSpec("lognormal", 0.5)
print("uniform draws from 1:", np.round([propose(uniform, 1.0, rng) for _ in range(5)], 3))
print("correction 1 -> 2:", log_correction(uniform, 1.0, 2.0), "= log(1/2)")
print("near the 1e-10 floor:", log_correction(lognormal, 2e-10, 1e-10))

# %%
# Flat-likelihood chains on a dummy design, thinned by 20 after a 30% burn-in.
dummy = Dataset.from_arrays([[0.0], [0.5], [1.0]], [0.0, 1.0, 0.0])
reference = rng.gamma(1.5, 1 / 2.6, 7000)
for proposal in (uniform, lognormal):
    chain = run_chain(dummy, PriorSpec("gamma"), proposal, n_iterations=200_000, seed=1,
                      theta0=[0.5], flat_likelihood=True)
    kept = chain.samples[60_001::20, 0]
    ks = stats.ks_2samp(kept, reference).statistic
    print(f"{proposal.label():>14}: acceptance {chain.acceptance_rate[0]:.2f}, "
          f"KS vs Gamma(1.5, 2.6) draws {ks:.4f}")
