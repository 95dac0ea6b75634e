"""Fully Bayesian Gaussian-process regression with sampled lengthscales.

The pieces:

* :mod:`gpprior.gp` -- kernel, profile likelihood, single-theta prediction
* :mod:`gpprior.priors` -- six lengthscale priors, including Jeffreys
* :mod:`gpprior.proposals` -- positive random-walk proposals and their corrections
* :mod:`gpprior.sampler` -- Metropolis-within-Gibbs and posterior prediction
* :mod:`gpprior.benchfuncs` -- Latin hypercubes, test functions, CSV ingestion
* :mod:`gpprior.metrics` -- RMSE, Gaussian CRPS, interval coverage
* :mod:`gpprior.bench` -- repeated-design experiments and summaries
"""

from .gp import (
    CovarianceFactor,
    Dataset,
    FactorizationFailure,
    GPConfig,
    PredictiveMoments,
    cross_kernel,
    kernel_matrix,
    log_likelihood,
    predictive_moments,
    profile_log_likelihood,
    tau2_hat,
)
from .priors import PriorSpec, jeffreys_workspace, kernel_derivative, log_prior_density
from .proposals import ProposalSpec, default_proposal, log_correction, propose
from .sampler import (
    Chain,
    DegenerateDesign,
    EmptyChain,
    PredictiveSummary,
    initialize,
    posterior_predict,
    run_chain,
)
from .benchfuncs import (
    TEST_FUNCTIONS,
    evaluate,
    get_function,
    latin_hypercube,
    load_dataset,
    scale_to_domain,
    scale_to_unit,
)
from .metrics import ScoreReport, score

__version__ = "0.1.0"
