"""
The locally imposing function: a Cauchy profile rescaled to peak at one.

``psi(delta; gamma) = 1 / (1 + (delta / gamma)**2)``, i.e. the Cauchy density
divided by its peak value ``1 / (pi * gamma)``. ``gamma`` is the half-width at
half-maximum and controls how far a constraint's influence reaches.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError


def _check_gamma(gamma):
    if not np.all(np.asarray(gamma) > 0):
        raise InvalidInputError("gamma must be positive")


def psi(delta, gamma):
    """Normalized Cauchy weight in ``(0, 1]``; ``psi(0) == 1``."""
    _check_gamma(gamma)
    delta = np.asarray(delta, dtype=float)
    if np.any(delta < 0) or not np.all(np.isfinite(delta)):
        raise InvalidInputError("distance must be finite and nonnegative")
    r = delta / gamma
    out = 1.0 / (1.0 + r * r)
    return float(out) if out.ndim == 0 else out


def psi_derivative(delta, gamma):
    """``d psi / d delta = -2 delta / gamma^2 * psi^2``."""
    p = np.asarray(psi(delta, gamma))
    out = -2.0 * np.asarray(delta, dtype=float) / gamma**2 * p * p
    return float(out) if out.ndim == 0 else out


def psi_gradient(x, projected, gamma):
    """
    Gradient of ``psi(||x - p(x)||)`` with respect to ``x``.

    Uses ``grad(delta^2) = 2 (x - p(x))``, valid wherever the nearest point
    ``p(x)`` is locally unique (everywhere for planes, off the bisectors for
    point lists). Returns an ``(n, d)`` array.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    diff = x - np.atleast_2d(projected)
    delta2 = np.sum(diff * diff, axis=1)
    p = 1.0 / (1.0 + delta2 / gamma**2)
    return (-2.0 / gamma**2) * (p * p)[:, None] * diff


def aggregate_psi(specs, x):
    """
    Combined LIF weight of several constraints at the points ``x``.

    Parameters
    ----------
    specs : sequence of ConstraintSpec
    x : (n, d) array_like

    Returns
    -------
    weight : (n,) ndarray
        ``max_i psi(distance_i(x); gamma_i)``.
    active : (n,) ndarray of int
        Index of the maximizing spec (lowest index on ties).
    """
    if len(specs) == 0:
        raise InvalidInputError("aggregate_psi needs at least one constraint")
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None] if specs[0].set.dim == 1 else x[None, :]
    table = np.empty((len(specs), x.shape[0]))
    for i, spec in enumerate(specs):
        table[i] = psi(spec.set.distance(x), spec.gamma)
    active = np.argmax(table, axis=0)
    return table[active, np.arange(x.shape[0])], active
