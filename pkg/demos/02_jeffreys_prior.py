"""
The Jeffreys prior for lengthscales
===================================

The density depends on the design through ``K``.  Here it is evaluated on a
grid of ``theta`` for a one-dimensional design and compared with a Fisher
information computed by finite differences of the covariance.
"""

# %%
import numpy as np

from gpprior import latin_hypercube
from gpprior.gp import kernel_matrix
from gpprior.priors import jeffreys_log_density, jeffreys_workspace, kernel_derivative

X = latin_hypercube(8, 1, seed=0).points
grid = np.geomspace(1e-3, 10, 13)

# %%
# Finite-difference Fisher information in (tau2, theta) with tau2 = 1, then
# the Schur complement that profiles tau2 out.
def fd_half_logdet(theta, h=1e-5):
    def cov(t2, th):
        return t2 * kernel_matrix(X, [th]).matrix

    C = cov(1.0, theta)
    Ci = np.linalg.inv(C)
    dt = (cov(1.0 + h, theta) - cov(1.0 - h, theta)) / (2 * h)
    dth = (cov(1.0, theta * (1 + h)) - cov(1.0, theta * (1 - h))) / (2 * h * theta)
    I = np.array([[0.5 * np.trace(Ci @ a @ Ci @ b) for b in (dt, dth)] for a in (dt, dth)])
    schur = I[1, 1] - I[1, 0] * I[0, 1] / I[0, 0]
    return 0.5 * np.log(2 * schur)


print(f"{'theta':>8} {'log p(theta)':>13} {'finite diff':>12}")
for th in grid:
    ws = jeffreys_workspace(X, [th])
    print(f"{th:8.3g} {jeffreys_log_density(ws):13.6f} {fd_half_logdet(th):12.6f}")

# %%
# The derivative of the kernel is available on its own as well.  Its
# diagonal is zero and it peaks where (x - x')^2 is close to theta.
dK = kernel_derivative(X, [0.05], 0)
print("max dK/dtheta:", dK.max().round(4), " diagonal:", np.diag(dK)[:3])
