"""
A small benchmark grid
======================

The same runner that backs ``gpprior-bench``, called from Python with
reduced sizes so it finishes in seconds.  Rows land in ``results.csv`` and
box-plot statistics in ``summary.csv``.
"""

# %%
import tempfile
from pathlib import Path

from gpprior.bench import ExperimentConfig, run_experiment, summarize, write_summary

out = Path(tempfile.mkdtemp()) / "grid"
config = ExperimentConfig(
    targets="higdon,hartmann3",
    priors="gamma,log_normal,jeffreys",
    proposals="uniform",
    repetitions=3,
    iterations=500,
    output_dir=str(out),
)
rows = run_experiment(config, workers=1)
print(len(rows), "rows written to", out / "results.csv")

# %%
# Median and quartiles of the test RMSE per configuration.
summary = summarize(rows)
write_summary(summary, out / "summary.csv")
for rec in summary:
    if rec["metric"] == "rmse":
        print(f"{rec['target']:>10} {rec['prior']:>11}  median {rec['median']:.4f}  "
              f"IQR [{rec['q1']:.4f}, {rec['q3']:.4f}]")

# %%
# The equivalent command line, at full protocol sizes:
#
#     gpprior-bench --target all --prior all --proposal all --reps 10 --out runs/grid
