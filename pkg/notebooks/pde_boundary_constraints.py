# %% [markdown]
# # Boundary constraints for a 2-d PDE solution
#
# Samples of `f(x1, x2) = exp(-x1) (x1 + x2^3)` on an 11 x 11 grid are fitted
# with 10 Gaussian units. The boundary `x1 = 0` carries either the Dirichlet
# condition `f = x2^3` or the Neumann condition `df/dx2 = 3 x2^2`.

# %%
import numpy as np

from lifrbf import bench, gcnn

x2 = np.linspace(0, 1, 21)
edge = np.column_stack([np.zeros_like(x2), x2])

# %% [markdown]
# ## Dirichlet
#
# The Lagrange baseline only sees 5 discretized boundary points; the blended
# fit sees the whole line.

# %%
cfg = bench.load_config(bench.shipped_config("table2.cfg"))
train, test, specs = bench._generate(cfg, 0)
base = bench.base_model(cfg, train.X)
for m in cfg.methods:
    model = bench.fit_method(cfg, m, train, specs, base)
    err = gcnn.predict_constrained(model, edge) - x2**3
    print(f"{m:8s} max boundary error {np.max(np.abs(err)):.3e}")

# %% [markdown]
# ## Neumann
#
# `gcnn-ec` penalizes the derivative residual softly; `gcnn-ec-i` imposes the
# antiderivative `x2^3` as a value constraint, which makes the boundary
# derivative exact.

# %%
cfg = bench.load_config(bench.shipped_config("table3.cfg"))
train, test, specs = bench._generate(cfg, 0)
base = bench.base_model(cfg, train.X)
for m in cfg.methods:
    model = bench.fit_method(cfg, m, train, specs, base)
    err = gcnn.predict_constrained_derivative(model, edge, axis=1) - 3 * x2**2
    print(f"{m:9s} max derivative error {np.max(np.abs(err)):.3e}")

# %%
for name, rep in bench.run_all(cfg).items():
    s = rep.summary()
    print(f"{name:9s} cstr {s['mse_cstr_mean']:.4g}  test {s['mse_test_mean']:.4g}")
