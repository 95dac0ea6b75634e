"""Lengthscale priors.

Five parametric families are applied independently to every component of
``theta``; the Jeffreys prior is joint and depends on the design through the
Fisher information of the Gaussian likelihood with the scale profiled out.
All log-densities return ``-inf`` outside the support instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gp import (
    FactorizationFailure,
    GPConfig,
    kernel_from_sqdiff,
    squared_differences,
    factorize,
)

__all__ = [
    "PRIOR_KINDS",
    "PriorSpec",
    "JeffreysWorkspace",
    "parse_prior",
    "log_prior_density",
    "log_density_1d",
    "kernel_derivative",
    "jeffreys_workspace",
    "jeffreys_log_density",
]

# kind -> (parameter names, defaults)
PRIOR_KINDS = {
    "inverse_gamma": (("alpha", "beta"), (5.0, 5.0)),
    "beta": (("alpha", "beta"), (1.0, 1.0)),
    "half_cauchy": (("sigma",), (1.0,)),
    "gamma": (("alpha", "rate"), (1.5, 3.9 / 1.5)),
    "log_normal": (("mu", "sigma"), (0.0, 10.0)),
    "jeffreys": ((), ()),
}

_ALIASES = {
    "ig": "inverse_gamma",
    "invgamma": "inverse_gamma",
    "inversegamma": "inverse_gamma",
    "halfcauchy": "half_cauchy",
    "hc": "half_cauchy",
    "lognormal": "log_normal",
    "ln": "log_normal",
    "jeffrey": "jeffreys",
}

_LOG_2_OVER_PI = math.log(2.0 / math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class PriorSpec:
    """A prior family and its hyperparameters.

    ``PriorSpec("gamma")`` uses the default hyperparameters; override them
    positionally, e.g. ``PriorSpec("gamma", (2.0, 1.0))``.  The Gamma family
    is parameterized by shape and *rate*, the Log-Normal by the mean and
    standard deviation of ``log theta``.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        kind = _ALIASES.get(self.kind.lower().replace("-", "_").replace(" ", ""), None)
        kind = kind or self.kind.lower().replace("-", "_")
        if kind not in PRIOR_KINDS:
            raise ValueError(
                f"unknown prior {self.kind!r}; choose from {sorted(PRIOR_KINDS)}"
            )
        names, defaults = PRIOR_KINDS[kind]
        params = tuple(float(p) for p in self.params) or defaults
        if len(params) != len(names):
            raise ValueError(f"{kind} prior takes {len(names)} parameters {names}")
        for name, value in zip(names, params):
            if name == "mu":
                if not math.isfinite(value):
                    raise ValueError("mu must be finite")
            elif not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{kind} parameter {name} must be positive, got {value}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", params)

    @property
    def is_joint(self):
        return self.kind == "jeffreys"

    def label(self):
        if not self.params:
            return self.kind
        return f"{self.kind}({','.join(f'{p:g}' for p in self.params)})"


def parse_prior(text):
    """Parse ``"gamma"`` or ``"gamma:1.5,2.6"`` into a :class:`PriorSpec`."""
    kind, _, rest = text.strip().partition(":")
    params = tuple(float(v) for v in rest.split(",") if v.strip()) if rest else ()
    return PriorSpec(kind, params)


def log_density_1d(spec, x):
    """Normalized log-density of one lengthscale component."""
    if not (x > 0) or math.isinf(x):
        return -math.inf
    kind = spec.kind
    p = spec.params
    if kind == "inverse_gamma":
        a, b = p
        return a * math.log(b) - math.lgamma(a) - (a + 1.0) * math.log(x) - b / x
    if kind == "gamma":
        a, rate = p
        return a * math.log(rate) - math.lgamma(a) + (a - 1.0) * math.log(x) - rate * x
    if kind == "beta":
        if x >= 1.0:
            return -math.inf
        a, b = p
        log_norm = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        out = log_norm
        # skip 0 * log(.) terms so the uniform case is exactly 0
        if a != 1.0:
            out += (a - 1.0) * math.log(x)
        if b != 1.0:
            out += (b - 1.0) * math.log1p(-x)
        return out
    if kind == "half_cauchy":
        (s,) = p
        r = x / s
        return _LOG_2_OVER_PI - math.log(s) - math.log1p(r * r)
    if kind == "log_normal":
        mu, s = p
        lx = math.log(x)
        z = (lx - mu) / s
        return -lx - math.log(s) - _HALF_LOG_2PI - 0.5 * z * z
    raise ValueError(f"{kind} is not a per-component prior")


def log_prior_density(spec, theta, dataset=None, config=None, factor=None):
    """Log prior density of a lengthscale vector.

    The Jeffreys prior needs the training inputs (``dataset``) and is returned
    unnormalized; ``factor`` may carry a Cholesky factorization of the
    jittered kernel at ``theta`` to avoid refactorizing.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if not np.all(theta > 0) or not np.all(np.isfinite(theta)):
        return -math.inf
    if spec.kind == "jeffreys":
        if dataset is None:
            raise ValueError("the Jeffreys prior depends on the design; pass a dataset")
        try:
            ws = jeffreys_workspace(
                dataset.inputs, theta, config, factor=factor, sqdiff=dataset.sqdiff
            )
        except FactorizationFailure:
            return -math.inf
        return jeffreys_log_density(ws)
    total = 0.0
    for x in theta:
        total += log_density_1d(spec, float(x))
    return total


@dataclass
class JeffreysWorkspace:
    """Trace statistics of the Fisher information in the lengthscales.

    ``t[i] = tr(K^{-1} dK_i)`` and ``S[i, j] = tr(K^{-1} dK_i K^{-1} dK_j)``.
    """

    t: np.ndarray
    S: np.ndarray
    n: int

    @property
    def information(self):
        """``S - t t^T / n``: twice the Schur complement of the scale block."""
        return self.S - np.outer(self.t, self.t) / self.n


def kernel_derivative(X, theta, i, sqdiff=None):
    """Derivative of the jitter-free kernel matrix w.r.t. ``theta[i]`` (0-based)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    d = X.shape[1]
    if not 0 <= i < d:
        raise IndexError(f"dimension index {i} out of range for d={d}")
    if sqdiff is None:
        sqdiff = squared_differences(X, X)
    K = kernel_from_sqdiff(sqdiff, theta)
    return K * sqdiff[i] / theta[i] ** 2


def jeffreys_workspace(X, theta, config=None, factor=None, sqdiff=None):
    """Compute ``t`` and ``S``; inverts the jittered kernel, differentiates the bare one."""
    config = config or GPConfig()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    n, d = X.shape
    if sqdiff is None:
        sqdiff = squared_differences(X, X)
    K = kernel_from_sqdiff(sqdiff, theta)
    if factor is None:
        Kj = K.copy()
        Kj[np.diag_indices_from(Kj)] += config.jitter
        factor = factorize(Kj)
    # B_i = dK_i K^{-1} = (K^{-1} dK_i)^T, with dK_i = (K o sqdiff_i) / theta_i^2;
    # the 1/theta_i^2 factors are applied to t and S at the end
    W = (sqdiff * K).reshape(d * n, n)
    B = (W @ factor.inverse()).reshape(d, n, n)
    scale = 1.0 / theta**2
    t = np.trace(B, axis1=1, axis2=2) * scale
    # tr(A_i A_j) = sum_ab B_i[b, a] B_j[a, b]
    flat = B.reshape(d, n * n)
    flat_T = np.ascontiguousarray(B.transpose(0, 2, 1)).reshape(d, n * n)
    S = (flat @ flat_T.T) * np.outer(scale, scale)
    S = 0.5 * (S + S.T)
    return JeffreysWorkspace(t, S, n)


def jeffreys_log_density(ws):
    """``0.5 * log det(S - t t^T / n)``, or ``-inf`` when it is not positive."""
    sign, logdet = np.linalg.slogdet(ws.information)
    if sign <= 0 or not np.isfinite(logdet):
        return -math.inf
    return 0.5 * float(logdet)
