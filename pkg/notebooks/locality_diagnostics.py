# %% [markdown]
# # Where do constraints change the network?
#
# Two diagnostics compare a constrained fit with the unconstrained network
# built on the same centers and widths:
#
# * `fm = f - f_wc`, the change in the output, and
# * `delta_w`, the change in the output weights.

# %%
import numpy as np

from lifrbf import analysis, bench

cfg = bench.load_config(bench.shipped_config("coupling.cfg"))
study = analysis.coupling_study(cfg)
{m: round(s["locality"], 4) for m, s in study.items()}

# %% [markdown]
# The locality ratio is the share of `sum |fm|` within `10 * gamma` of a
# constraint point. The blended fit changes the output only right at the
# constraints. The Lagrange fit spreads the change over the whole interval.

# %%
s = study["lagrange"]
idx = np.argsort(-np.abs(s["fm"]))[:5]
np.column_stack([s["x"][idx], s["fm"][idx]])

# %% [markdown]
# ## Weight changes for narrow units
#
# With 500 units and widths 0.05 to 0.15, the largest normalized weight
# changes sit next to a constraint point for both schemes.

# %%
cfg = bench.load_config(bench.shipped_config("fig7.cfg"), {"sigmas": "0.05"})
for (sigma, method), rep in analysis.weight_study(cfg).items():
    top = np.argsort(-np.abs(rep.normalized[1:]))[:4]
    print(sigma, method, np.round(rep.center_coords[top, 0], 3))
