"""
Fitting a tabulated dataset
===========================

Any comma-separated file with a header row can stand in for a test
function.  Here a synthetic table of peak field strength against charge
density is written, loaded and fitted.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from gpprior import PriorSpec, ProposalSpec, posterior_predict, run_chain
from gpprior.benchfuncs import load_dataset

rho = np.linspace(1e-6, 5e-6, 25)
field = 3e5 * rho + 0.05 * np.sin(2e6 * rho)
path = Path(tempfile.mkdtemp()) / "field.csv"
path.write_text("rho,max_field\n" + "".join(f"{r:.6e},{e:.6f}\n" for r, e in zip(rho, field)))

# %%
# Inputs are mapped to [0, 1] so the lengthscale is on a unit scale.
data = load_dataset(path, input_columns=1, scale_inputs=True)
print("n =", data.n, " bounds =", data.bounds.tolist(), " offset =", round(data.output_offset, 4))

chain = run_chain(data, PriorSpec("inverse_gamma"), ProposalSpec("lognormal", 0.5),
                  n_iterations=3000, seed=0)
query = np.array([[1.5e-6], [3.3e-6]])
pred = posterior_predict(chain, data, data.transform(query), full_covariance=False)
for q, m, v in zip(query[:, 0], pred.mean, pred.variance):
    print(f"rho={q:.2e}  mean={m:.5f}  sd={np.sqrt(v):.2e}  truth={3e5 * q + 0.05 * np.sin(2e6 * q):.5f}")
