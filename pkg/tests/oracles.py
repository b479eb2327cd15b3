"""
Independent reference computations used by the tests.

Nothing here calls into lifrbf: features and objectives are re-derived from
their scalar formulas, and minimizers are iterative.
"""
import math

import numpy as np
from scipy.optimize import minimize


def gaussian(x, mu, sigma):
    return math.exp(-sum((a - b) ** 2 for a, b in zip(x, mu)) / sigma**2)


def network(w, x, centers, widths):
    return w[0] + sum(w[j + 1] * gaussian(x, centers[j], widths[j]) for j in range(len(centers)))


def network_dk(w, x, centers, widths, k, h=1e-6):
    xp, xm = list(x), list(x)
    xp[k] += h
    xm[k] -= h
    return (network(w, xp, centers, widths) - network(w, xm, centers, widths)) / (2 * h)


def cauchy_weight(delta, gamma):
    return 1.0 / (1.0 + (delta / gamma) ** 2)


def bfgs(objective, x0, gtol=1e-12):
    res = minimize(objective, x0, method="BFGS", options={"gtol": gtol, "maxiter": 20000})
    # polish with a second run from the first optimum
    res = minimize(objective, res.x, method="BFGS", options={"gtol": gtol, "maxiter": 20000})
    return res.x


def gradient_descent(grad, x0, step, iters=200000, tol=1e-14):
    x = np.array(x0, dtype=float)
    for _ in range(iters):
        g = grad(x)
        x = x - step * g
        if np.max(np.abs(g)) < tol:
            break
    return x


def slsqp_equality(objective, x0, eq_fun):
    res = minimize(
        objective,
        x0,
        method="SLSQP",
        constraints=[{"type": "eq", "fun": eq_fun}],
        options={"ftol": 1e-15, "maxiter": 2000},
    )
    return res.x


def penalty_continuation(design, rhs, cons_rows, cons_rhs, penalties=(1e2, 1e4, 1e6, 1e8, 1e10, 1e12)):
    """Minimize ||rhs - A w||^2 + rho ||C w - d||^2 for increasing rho; return the last."""
    w = None
    for rho in penalties:
        stacked = np.vstack([design, math.sqrt(rho) * cons_rows])
        target = np.concatenate([rhs, math.sqrt(rho) * cons_rhs])
        w = np.linalg.lstsq(stacked, target, rcond=None)[0]
    return w


def central_difference(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out[k] = (f(x + e) - f(x - e)) / (2 * h)
    return out
