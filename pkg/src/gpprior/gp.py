"""Zero-mean Gaussian process with an anisotropic squared-exponential kernel.

All functions here are stateless: they take a :class:`Dataset`, a lengthscale
vector and a :class:`GPConfig` and return plain numpy objects.  The kernel is

    K(x, x') = exp(-sum_i (x_i - x'_i)**2 / theta_i)

with a fixed jitter ``g`` added to the diagonal of training covariances.
The scale ``tau2`` is never sampled; it is profiled out in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

__all__ = [
    "FactorizationFailure",
    "Dataset",
    "GPConfig",
    "CovarianceFactor",
    "PredictiveMoments",
    "as_theta",
    "squared_differences",
    "kernel_from_sqdiff",
    "kernel_matrix",
    "cross_kernel",
    "factorize",
    "quadratic_form",
    "tau2_hat",
    "log_likelihood",
    "profile_log_likelihood",
    "profile_constant",
    "predictive_moments",
]

LOG_2PI = math.log(2.0 * math.pi)


class FactorizationFailure(np.linalg.LinAlgError):
    """The jittered kernel matrix is not numerically positive definite."""


@dataclass(frozen=True)
class GPConfig:
    jitter: float = 1e-8

    def __post_init__(self):
        if not self.jitter > 0:
            raise ValueError(f"jitter must be positive, got {self.jitter}")


@dataclass
class Dataset:
    """Training data for the GP.

    Parameters
    ----------
    inputs : ndarray, shape (n, d)
        Input locations, either raw or mapped to the unit cube.
    outputs : ndarray, shape (n,)
        Centered outputs.
    output_offset : float
        Sample mean that was subtracted from the raw outputs.
    bounds : ndarray, shape (d, 2)
        Per-dimension ``(low, high)`` of the *raw* input domain.
    scaled : bool
        True when ``inputs`` live on ``[0, 1]^d`` (affine image of ``bounds``).
    """

    inputs: np.ndarray
    outputs: np.ndarray
    output_offset: float
    bounds: np.ndarray
    scaled: bool = False
    _sqdiff: np.ndarray | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_arrays(cls, X, y, bounds=None, scale_inputs=False):
        """Build a dataset from raw inputs and outputs, centering ``y``.

        ``bounds`` defaults to the per-column min/max of ``X``.  With
        ``scale_inputs`` the stored inputs are mapped to the unit cube.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.ndim != 2:
            raise ValueError("inputs must be a 2-d array")
        y = np.asarray(y, dtype=float).reshape(-1)
        n, d = X.shape
        if n < 1 or d < 1:
            raise ValueError("need at least one point and one dimension")
        if y.shape[0] != n:
            raise ValueError(f"got {n} input rows but {y.shape[0]} outputs")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("inputs and outputs must be finite")
        if bounds is None:
            bounds = np.column_stack([X.min(axis=0), X.max(axis=0)])
        bounds = np.asarray(bounds, dtype=float).reshape(d, 2)
        if np.any(X < bounds[:, 0]) or np.any(X > bounds[:, 1]):
            raise ValueError("inputs fall outside the declared bounds")
        offset = float(np.mean(y))
        outputs = y - offset
        # second pass removes the O(eps * |offset|) residual mean
        outputs = outputs - np.mean(outputs)
        inputs = X
        if scale_inputs:
            inputs = to_unit(X, bounds)
        return cls(inputs, outputs, offset, bounds, bool(scale_inputs))

    @property
    def n(self):
        return self.inputs.shape[0]

    @property
    def d(self):
        return self.inputs.shape[1]

    @property
    def raw_outputs(self):
        return self.outputs + self.output_offset

    def transform(self, Xnew):
        """Map raw locations into the coordinates the GP was fitted on."""
        Xnew = np.atleast_2d(np.asarray(Xnew, dtype=float))
        if self.scaled:
            return to_unit(Xnew, self.bounds)
        return Xnew

    @property
    def sqdiff(self):
        """Per-dimension squared differences of the inputs, shape (d, n, n)."""
        if self._sqdiff is None:
            self._sqdiff = squared_differences(self.inputs, self.inputs)
        return self._sqdiff


def to_unit(X, bounds):
    bounds = np.asarray(bounds, dtype=float)
    width = bounds[:, 1] - bounds[:, 0]
    width = np.where(width > 0, width, 1.0)
    return (np.asarray(X, dtype=float) - bounds[:, 0]) / width


@dataclass
class CovarianceFactor:
    matrix: np.ndarray
    lower_triangular_factor: np.ndarray
    log_determinant: float

    def solve(self, b):
        """Return ``K^{-1} b``."""
        b = np.asarray(b, dtype=float)
        x, info = lapack.dpotrs(self.lower_triangular_factor, b, lower=1)
        if info != 0:
            raise FactorizationFailure(f"dpotrs failed with info={info}")
        return x

    def half_solve(self, b):
        """Return ``L^{-1} b`` where ``K = L L^T``."""
        x, info = lapack.dtrtrs(self.lower_triangular_factor, b, lower=1)
        if info != 0:
            raise FactorizationFailure(f"dtrtrs failed with info={info}")
        return x

    def inverse(self):
        inv, info = lapack.dpotri(self.lower_triangular_factor, lower=1)
        if info != 0:
            raise FactorizationFailure(f"dpotri failed with info={info}")
        inv = np.tril(inv)
        return inv + np.tril(inv, -1).T


@dataclass
class PredictiveMoments:
    mean: np.ndarray
    covariance: np.ndarray
    tau2: float

    @property
    def variance(self):
        return np.diag(self.covariance).copy()


def as_theta(theta, d=None):
    """Validate a lengthscale vector and return it as a float array."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.ndim != 1:
        raise ValueError("theta must be a vector")
    if d is not None and theta.shape[0] != d:
        raise ValueError(f"theta has length {theta.shape[0]}, expected {d}")
    if not np.all(np.isfinite(theta)) or np.any(theta <= 0):
        raise ValueError(f"lengthscales must be positive and finite, got {theta}")
    return theta


def squared_differences(A, B):
    """Return ``D[i, a, b] = (A[a, i] - B[b, i])**2`` with shape (d, m, n)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError(
            f"dimension mismatch: {A.shape[1]} columns vs {B.shape[1]} columns"
        )
    diff = A.T[:, :, None] - B.T[:, None, :]
    return diff * diff


def kernel_from_sqdiff(sqdiff, theta):
    d, m, n = sqdiff.shape
    return np.exp((-1.0 / theta) @ sqdiff.reshape(d, m * n)).reshape(m, n)


def cross_kernel(Xnew, X, theta):
    """Jitter-free kernel between ``Xnew`` (m x d) and ``X`` (n x d)."""
    Xnew = np.atleast_2d(np.asarray(Xnew, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    theta = as_theta(theta, X.shape[1])
    return kernel_from_sqdiff(squared_differences(Xnew, X), theta)


def factorize(K):
    """Cholesky-factorize a symmetric matrix, raising on failure."""
    L, info = lapack.dpotrf(K, lower=1, clean=1)
    if info != 0:
        raise FactorizationFailure(
            f"kernel matrix is not positive definite (dpotrf info={info})"
        )
    logdet = 2.0 * float(np.sum(np.log(np.diagonal(L))))
    return CovarianceFactor(K, L, logdet)


def _jittered(K, jitter):
    K[np.diag_indices_from(K)] += jitter
    return K


def kernel_matrix(X, theta, config=None):
    """Training covariance ``K + g I`` and its Cholesky factorization."""
    config = config or GPConfig()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    theta = as_theta(theta, X.shape[1])
    if not np.all(np.isfinite(X)):
        raise ValueError("inputs must be finite")
    K = kernel_from_sqdiff(squared_differences(X, X), theta)
    return factorize(_jittered(K, config.jitter))


def _dataset_factor(dataset, theta, config):
    K = kernel_from_sqdiff(dataset.sqdiff, theta)
    return factorize(_jittered(K, config.jitter))


def quadratic_form(dataset, factor):
    """``Y^T K^{-1} Y`` via one triangular solve."""
    z = factor.half_solve(dataset.outputs)
    return float(z @ z)


def tau2_hat(dataset, factor):
    """Closed-form maximizer of the likelihood in the scale parameter."""
    return quadratic_form(dataset, factor) / dataset.n


def profile_constant(n):
    """Constant that makes the profile likelihood equal the full one at tau2_hat."""
    return -0.5 * n * LOG_2PI - 0.5 * n + 0.5 * n * math.log(n)


def log_likelihood(dataset, theta, tau2, config=None):
    """Gaussian log-likelihood of the centered outputs at ``(tau2, theta)``."""
    config = config or GPConfig()
    theta = as_theta(theta, dataset.d)
    factor = _dataset_factor(dataset, theta, config)
    n = dataset.n
    q = quadratic_form(dataset, factor)
    return (
        -0.5 * n * LOG_2PI
        - 0.5 * n * math.log(tau2)
        - 0.5 * factor.log_determinant
        - 0.5 * q / tau2
    )


def profile_log_likelihood(dataset, theta, config=None, factor=None):
    """Log-likelihood with ``tau2`` replaced by its closed-form estimate.

    Returns ``-inf`` when the quadratic form is not positive.  A precomputed
    ``factor`` for the same ``theta`` may be passed to skip factorization.
    """
    config = config or GPConfig()
    if factor is None:
        theta = as_theta(theta, dataset.d)
        factor = _dataset_factor(dataset, theta, config)
    n = dataset.n
    q = quadratic_form(dataset, factor)
    if not q > 0:
        return -math.inf
    return profile_constant(n) - 0.5 * n * math.log(q) - 0.5 * factor.log_determinant


def predictive_moments(dataset, theta, Xnew, config=None, factor=None, full_covariance=True):
    """Predictive mean and covariance at ``Xnew`` for a single ``theta``.

    ``Xnew`` must already be in the dataset's coordinates (see
    :meth:`Dataset.transform`).  The mean is in centered units.  With
    ``full_covariance=False`` only the diagonal is formed and ``covariance``
    holds a length-m vector of variances.
    """
    config = config or GPConfig()
    theta = as_theta(theta, dataset.d)
    Xnew = np.atleast_2d(np.asarray(Xnew, dtype=float))
    if factor is None:
        factor = _dataset_factor(dataset, theta, config)
    tau2 = tau2_hat(dataset, factor)
    kx = kernel_from_sqdiff(squared_differences(Xnew, dataset.inputs), theta)
    alpha = factor.solve(dataset.outputs)
    mean = kx @ alpha
    V = factor.half_solve(np.ascontiguousarray(kx.T))
    if full_covariance:
        kxx = kernel_from_sqdiff(squared_differences(Xnew, Xnew), theta)
        cov = tau2 * (_jittered(kxx, config.jitter) - V.T @ V)
        cov = 0.5 * (cov + cov.T)
        diag = np.diagonal(cov).copy()
        cov[np.diag_indices_from(cov)] = _clamp(diag, tau2)
    else:
        cov = _clamp(tau2 * (1.0 + config.jitter - np.einsum("ij,ij->j", V, V)), tau2)
    return PredictiveMoments(mean, cov, tau2)


def _clamp(var, tau2):
    worst = float(np.min(var)) if var.size else 0.0
    if worst < -1e-10 * max(tau2, 1.0):
        warnings.warn(
            f"predictive variance {worst:.3e} is negative beyond round-off; clamping",
            RuntimeWarning,
            stacklevel=3,
        )
    return np.maximum(var, 0.0)
