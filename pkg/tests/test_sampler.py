import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpprior import sampler
from gpprior.benchfuncs import get_function, latin_hypercube, scale_to_domain
from gpprior.gp import Dataset, GPConfig, predictive_moments, tau2_hat, kernel_matrix
from gpprior.priors import PriorSpec
from gpprior.proposals import ProposalSpec
from gpprior.sampler import (
    Chain,
    DegenerateDesign,
    EmptyChain,
    initialize,
    log_acceptance_ratio,
    posterior_predict,
    retained_indices,
    run_chain,
)

PRIORS = ["inverse_gamma", "beta", "half_cauchy", "gamma", "log_normal", "jeffreys"]
PROPOSALS = [ProposalSpec("uniform", 2.0), ProposalSpec("lognormal", 0.5)]


def higdon_dataset(n=10, seed=0, scale_inputs=True):
    fn = get_function("higdon")
    X = scale_to_domain(latin_hypercube(n, 1, seed), fn.bounds)
    return Dataset.from_arrays(X, fn(X), bounds=fn.bounds, scale_inputs=scale_inputs)


def small_dataset(seed=0, n=8, d=2):
    rng = np.random.default_rng(seed)
    X = rng.random((n, d))
    return Dataset.from_arrays(X, np.sin(3 * X).sum(axis=1))


class TestInitialize:
    def test_two_points(self):
        ds = Dataset.from_arrays([[0.0], [1.0]], [0.0, 1.0])
        assert initialize(ds)[0] == pytest.approx(1 / math.sqrt(2))

    def test_lhs_range(self):
        vals = [initialize(Dataset.from_arrays(latin_hypercube(10, 1, s).points, np.zeros(10)))[0]
                for s in range(50)]
        assert 0.25 < np.median(vals) < 0.35
        for s, v in enumerate(vals[:5]):
            pts = latin_hypercube(10, 1, s).points[:, 0]
            assert v == pytest.approx(np.sqrt(np.sum((pts - pts.mean()) ** 2) / 9))

    def test_constant_column(self):
        ds = Dataset.from_arrays([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]], [0.0, 1.0, 2.0])
        with pytest.raises(DegenerateDesign):
            initialize(ds)
        with pytest.raises(DegenerateDesign):
            run_chain(ds, PriorSpec("gamma"), PROPOSALS[0], n_iterations=2)

    def test_single_point(self):
        with pytest.raises(DegenerateDesign):
            initialize(Dataset.from_arrays([[0.3]], [1.0]))


class TestAcceptanceRatio:
    def test_identity(self):
        assert log_acceptance_ratio(-3.2, -3.2, 0.0) == 0.0

    def test_zero_mass(self):
        assert log_acceptance_ratio(-math.inf, -math.inf, 0.0) == -math.inf
        assert log_acceptance_ratio(-1.0, -math.inf, 0.0) == 0.0
        assert log_acceptance_ratio(-1.0, -2.0, -math.inf) == -math.inf

    def test_capped(self):
        assert log_acceptance_ratio(0.0, -5.0, 1.0) == 0.0
        assert log_acceptance_ratio(-5.0, 0.0, 1.0) == -4.0

    def test_forced_identity_always_accepts(self, monkeypatch):
        monkeypatch.setattr(sampler, "propose", lambda spec, cur, rng: cur)
        chain = run_chain(small_dataset(), PriorSpec("gamma"), PROPOSALS[0], n_iterations=30)
        assert chain.accepted.all()
        assert np.all(chain.samples == chain.samples[0])


class TestRunChain:
    def test_deterministic(self):
        ds = small_dataset(1)
        a = run_chain(ds, PriorSpec("half_cauchy"), PROPOSALS[1], n_iterations=60, seed=7)
        b = run_chain(ds, PriorSpec("half_cauchy"), PROPOSALS[1], n_iterations=60, seed=7)
        c = run_chain(ds, PriorSpec("half_cauchy"), PROPOSALS[1], n_iterations=60, seed=8)
        np.testing.assert_array_equal(a.samples, b.samples)
        np.testing.assert_array_equal(a.accepted, b.accepted)
        assert not np.array_equal(a.samples, c.samples)

    def test_shapes_and_counts(self):
        chain = run_chain(small_dataset(), PriorSpec("gamma"), PROPOSALS[0], n_iterations=40)
        assert chain.samples.shape == (41, 2)
        assert chain.accepted.shape == (40, 2)
        assert np.all((0 <= chain.accept_counts) & (chain.accept_counts <= 40))
        assert chain.n_iterations == 40 and chain.d == 2

    @pytest.mark.parametrize("prior", PRIORS)
    @pytest.mark.parametrize("proposal", PROPOSALS, ids=lambda p: p.kind)
    def test_positive_and_tau2_consistent(self, prior, proposal):
        ds = small_dataset(2)
        chain = run_chain(ds, PriorSpec(prior), proposal, n_iterations=40, seed=3)
        assert np.all(chain.samples > 0)
        for t in (0, 13, 40):
            if math.isnan(chain.tau2[t]):
                continue
            f = kernel_matrix(ds.inputs, chain.samples[t])
            assert chain.tau2[t] == pytest.approx(tau2_hat(ds, f), rel=1e-12, abs=1e-12)

    @given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(PRIORS))
    @settings(max_examples=15, deadline=None)
    def test_positivity_property(self, seed, kind):
        chain = run_chain(small_dataset(seed % 7, n=5), PriorSpec(kind), PROPOSALS[seed % 2],
                          n_iterations=15, seed=seed)
        assert np.all(chain.samples > 0)

    def test_stored_states_consistent_with_flags(self):
        chain = run_chain(small_dataset(), PriorSpec("gamma"), PROPOSALS[1], n_iterations=50)
        moved = chain.samples[1:] != chain.samples[:-1]
        np.testing.assert_array_equal(moved, chain.accepted)

    def test_higdon_acceptance_rate_strictly_inside(self):
        ds = higdon_dataset()
        for prior in ("gamma", "log_normal", "inverse_gamma"):
            chain = run_chain(ds, PriorSpec(prior), PROPOSALS[0], n_iterations=10_000, seed=1)
            rate = chain.acceptance_rate[0]
            assert 0 < rate < 1

    def test_flat_mode_records_prior_only(self):
        chain = run_chain(small_dataset(), PriorSpec("gamma"), PROPOSALS[0], n_iterations=5,
                          flat_likelihood=True)
        assert np.all(chain.log_likelihood == 0.0)
        assert np.all(np.isnan(chain.tau2))

    def test_invalid_iterations(self):
        with pytest.raises(ValueError):
            run_chain(small_dataset(), PriorSpec("gamma"), PROPOSALS[0], n_iterations=0)


def _fixed_chain(thetas):
    thetas = np.asarray(thetas, dtype=float).reshape(len(thetas), -1)
    n = len(thetas) - 1
    return Chain(thetas, np.zeros(n + 1), np.zeros(n + 1), np.zeros(n + 1),
                 np.zeros((n, thetas.shape[1]), bool), n, 0)


class TestPosteriorPredict:
    def test_retained_count(self):
        burn_in, idx = retained_indices(10, 0.3, 1)
        assert burn_in == 3
        assert idx.tolist() == [4, 5, 6, 7, 8, 9, 10]
        assert retained_indices(10, 0.3, 3)[1].tolist() == [4, 7, 10]

    def test_constant_chain(self):
        ds = small_dataset(3, d=1)
        Xnew = np.linspace(0, 1, 5)[:, None]
        chain = _fixed_chain([[0.2]] * 11)
        s = posterior_predict(chain, ds, Xnew)
        pm = predictive_moments(ds, [0.2], Xnew)
        np.testing.assert_allclose(s.epistemic, 0.0, atol=1e-14)
        np.testing.assert_allclose(s.mean, pm.mean + ds.output_offset, rtol=1e-12)
        np.testing.assert_allclose(s.covariance, pm.covariance, rtol=1e-12, atol=1e-15)
        assert s.n_samples == 7 and s.burn_in == 3

    def test_two_values_by_hand(self):
        ds = small_dataset(4, d=1)
        x = np.array([[0.37]])
        # burn-in of 1 state out of N=4 leaves states 2, 3, 4
        chain = _fixed_chain([[9.0], [9.0], [0.1], [0.5], [0.1]])
        s = posterior_predict(chain, ds, x, burn_in_fraction=0.25)
        a = predictive_moments(ds, [0.1], x)
        b = predictive_moments(ds, [0.5], x)
        mus = np.array([a.mean[0], b.mean[0], a.mean[0]])
        bar = mus.mean()
        assert s.epistemic[0, 0] == pytest.approx(np.mean((mus - bar) ** 2), rel=1e-10, abs=1e-15)
        assert s.mean[0] == pytest.approx(bar + ds.output_offset, rel=1e-12)
        alea = (2 * a.covariance[0, 0] + b.covariance[0, 0]) / 3
        assert s.aleatoric[0, 0] == pytest.approx(alea, rel=1e-12)

    def test_two_samples_epistemic_formula(self):
        ds = small_dataset(5, d=1)
        x = np.array([[0.61]])
        chain = _fixed_chain([[1.0], [0.05], [0.3]])
        s = posterior_predict(chain, ds, x, burn_in_fraction=0.0)
        m1 = predictive_moments(ds, [0.05], x).mean[0]
        m2 = predictive_moments(ds, [0.3], x).mean[0]
        bar = (m1 + m2) / 2
        assert s.epistemic[0, 0] == pytest.approx(((m1 - bar) ** 2 + (m2 - bar) ** 2) / 2)

    def test_decomposition_and_psd(self):
        ds = small_dataset(6)
        chain = run_chain(ds, PriorSpec("log_normal"), PROPOSALS[0], n_iterations=80, seed=2)
        Xnew = np.random.default_rng(0).random((6, 2))
        s = posterior_predict(chain, ds, Xnew)
        np.testing.assert_allclose(s.covariance, s.aleatoric + s.epistemic, atol=1e-10)
        assert np.linalg.eigvalsh(s.epistemic).min() >= -1e-10
        diag = posterior_predict(chain, ds, Xnew, full_covariance=False)
        np.testing.assert_allclose(diag.variance, s.variance, rtol=1e-10, atol=1e-14)
        np.testing.assert_allclose(diag.mean, s.mean, rtol=1e-12)

    def test_run_length_weighting_matches_naive(self):
        ds = small_dataset(7)
        chain = run_chain(ds, PriorSpec("gamma"), PROPOSALS[1], n_iterations=40, seed=4)
        Xnew = np.random.default_rng(1).random((3, 2))
        s = posterior_predict(chain, ds, Xnew, thinning=2)
        _, idx = retained_indices(40, 0.3, 2)
        mus = np.array([predictive_moments(ds, chain.samples[t], Xnew).mean for t in idx])
        covs = np.array([predictive_moments(ds, chain.samples[t], Xnew).covariance for t in idx])
        np.testing.assert_allclose(s.mean, mus.mean(axis=0) + ds.output_offset, rtol=1e-10)
        np.testing.assert_allclose(s.aleatoric, covs.mean(axis=0), rtol=1e-10, atol=1e-15)
        np.testing.assert_allclose(s.epistemic, np.cov(mus.T, bias=True), rtol=1e-7, atol=1e-13)

    def test_empty_chain(self):
        ds = small_dataset(8, d=1)
        with pytest.raises(EmptyChain):
            posterior_predict(_fixed_chain([[0.2]]), ds, [[0.1]], burn_in_fraction=0.9)

    def test_interpolates_training_data(self):
        # raw coordinates: the start lies in the interpolating mode
        ds = higdon_dataset(scale_inputs=False)
        chain = run_chain(ds, PriorSpec("gamma"), PROPOSALS[0], n_iterations=300, seed=0)
        _, idx = retained_indices(300)
        scale = np.std(ds.raw_outputs)
        for theta in np.unique(chain.samples[idx], axis=0):
            mu = predictive_moments(ds, theta, ds.inputs, GPConfig(), full_covariance=False).mean
            assert np.max(np.abs(mu - ds.outputs)) < 1e-3 * scale

    def test_long_lengthscale_acts_as_nugget(self):
        # once K is numerically rank deficient the jitter behaves like noise
        ds = higdon_dataset()
        mu = predictive_moments(ds, [3.0], ds.inputs, full_covariance=False).mean
        assert np.max(np.abs(mu - ds.outputs)) > 1e-2 * np.std(ds.raw_outputs)
