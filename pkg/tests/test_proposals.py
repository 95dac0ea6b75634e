import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpprior.proposals import (
    ProposalSpec,
    default_proposal,
    log_correction,
    parse_proposal,
    propose,
)

UNIF = ProposalSpec("uniform", 2.0)
LOGN = ProposalSpec("lognormal", 0.5)


def test_validation():
    with pytest.raises(ValueError):
        ProposalSpec("uniform", 1.0)
    with pytest.raises(ValueError):
        ProposalSpec("lognormal", 0.0)
    with pytest.raises(ValueError):
        ProposalSpec("lognormal", 0.5, lower_bound=0.0)
    with pytest.raises(ValueError):
        ProposalSpec("gaussian_process", 1.0)


def test_defaults_by_dimension():
    assert default_proposal("uniform", 4).step == 2.0
    assert default_proposal("uniform", 8).step == 1.5
    assert default_proposal("lognormal", 1).step == 0.5
    assert default_proposal("lognormal", 5).step == 0.1
    assert default_proposal("lognormal", 1).lower_bound == 1e-10
    assert parse_proposal("uniform:1.2", 3) == ProposalSpec("uniform", 1.2)
    assert parse_proposal("normal", 3).kind == "lognormal"


def test_uniform_support():
    rng = np.random.default_rng(0)
    draws = np.array([propose(UNIF, 1.0, rng) for _ in range(10_000)])
    assert draws.min() >= 0.5 and draws.max() <= 2.0
    # spread over the whole interval
    assert draws.min() < 0.51 and draws.max() > 1.99


def test_lognormal_moments():
    rng = np.random.default_rng(1)
    logs = np.log([propose(LOGN, 1.0, rng) for _ in range(100_000)])
    assert abs(logs.mean()) < 0.02 * 0.5
    assert logs.std() == pytest.approx(0.5, rel=0.02)


@pytest.mark.parametrize("current", [1e-10, 1e-9, 3e-10])
def test_lognormal_truncation(current):
    rng = np.random.default_rng(2)
    draws = np.array([propose(LOGN, current, rng) for _ in range(2000)])
    assert np.all(draws >= LOGN.lower_bound)


def test_truncated_law_at_bound():
    # at the bound the log-candidate is a half-normal above log(lb)
    rng = np.random.default_rng(3)
    spec = ProposalSpec("lognormal", 0.5, lower_bound=1.0)
    z = np.log([propose(spec, 1.0, rng) for _ in range(50_000)])
    assert z.min() >= 0.0
    assert z.mean() == pytest.approx(0.5 * math.sqrt(2 / math.pi), rel=0.02)


def test_correction_examples():
    assert log_correction(UNIF, 1.0, 1.0) == 0.0
    assert log_correction(LOGN, 0.7, 0.7) == 0.0
    assert log_correction(UNIF, 1.0, 2.0) == pytest.approx(math.log(0.5), abs=1e-15)
    assert log_correction(LOGN, 1.0, 3.0) == pytest.approx(math.log(3.0), abs=1e-9)
    assert log_correction(LOGN, 0.02, 50.0) == pytest.approx(math.log(2500.0), abs=1e-9)


def test_correction_unreachable():
    assert log_correction(UNIF, 1.0, 2.5) == -math.inf
    assert log_correction(UNIF, 1.0, 0.0) == -math.inf
    assert log_correction(LOGN, 1.0, 1e-11) == -math.inf


def test_correction_near_bound_includes_normalizer():
    spec = ProposalSpec("lognormal", 1.0, lower_bound=1.0)
    # Z(1) = 1/2, Z(e) = Phi(1)
    expected = 1.0 + math.log(0.5) - math.log(0.8413447460685429)
    assert log_correction(spec, 1.0, math.e) == pytest.approx(expected, abs=1e-12)


@given(
    a=st.floats(1e-9, 1e9),
    r=st.floats(0.5, 2.0),
    kind=st.sampled_from(["uniform", "lognormal"]),
)
@settings(max_examples=300)
def test_antisymmetry(a, r, kind):
    spec = UNIF if kind == "uniform" else LOGN
    b = a * r
    fwd, bwd = log_correction(spec, a, b), log_correction(spec, b, a)
    assert math.isfinite(fwd)
    assert fwd == pytest.approx(-bwd, abs=1e-12)


def test_positive_over_many_calls():
    rng = np.random.default_rng(4)
    specs = [UNIF, LOGN, ProposalSpec("uniform", 1.2), ProposalSpec("lognormal", 3.0)]
    currents = np.exp(rng.uniform(np.log(1e-10), np.log(1e10), 250_000))
    lo = math.inf
    for spec in specs:
        for c in currents:
            lo = min(lo, propose(spec, c, rng))
    assert lo > 0
