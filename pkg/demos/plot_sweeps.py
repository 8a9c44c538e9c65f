"""
Parameter sweeps
================

The four sweeps, at a reduced scale so this runs in a minute or two. The same
grids are available from the command line, e.g.::

    qrendezvous run --preset sweep-G --out sweep_g.csv
"""
import io

import matplotlib.pyplot as plt
import pandas as pd

from qrendezvous.cli import format_csv, make_preset, run_experiment

frames = {}
for name in ("sweep-N-fixed-G", "sweep-N-proportional", "sweep-radios", "sweep-G"):
    rows = run_experiment(make_preset(name, draws=10, trials=20, seed=1))
    frames[name] = pd.read_csv(io.StringIO(format_csv(rows)))
    print(frames[name][["point", "algorithm", "ettr", "ci95", "mttr_measured", "mttr_bound"]])

fig, axes = plt.subplots(1, 4, figsize=(16, 3.5))
for ax, (name, df) in zip(axes, frames.items()):
    for alg, sub in df.groupby("algorithm"):
        ax.errorbar(sub["point"].astype(str), sub["ettr"], yerr=sub["ci95"], label=alg, marker="o")
    ax.set_title(name)
    ax.set_ylabel("ETTR")
axes[0].legend()
fig.tight_layout()
fig.savefig("sweeps.png")
