"""
Gaussian RBF networks: feature maps, derivatives, center placement and the
plain least-squares fit.

The network output is ``f(x) = w_0 + sum_j w_j * exp(-||x - mu_j||^2 / sigma_j^2)``,
i.e. the bias occupies column 0 of the feature matrix and index 0 of the
weight vector.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.cluster.vq import kmeans2
from scipy.spatial.distance import cdist

from . import numerics
from .errors import InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RbfModel:
    """Centers ``(m, d)``, widths ``(m,)`` and weights ``(m + 1,)``."""

    centers: np.ndarray
    widths: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        widths = np.asarray(self.widths, dtype=float).reshape(-1)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        m = centers.shape[0]
        if m < 1:
            raise InvalidInputError("an RBF model needs at least one center")
        if widths.shape != (m,):
            raise InvalidInputError(f"expected {m} widths, got {widths.shape[0]}")
        if weights.shape != (m + 1,):
            raise InvalidInputError(f"expected {m + 1} weights, got {weights.shape[0]}")
        if not np.all(widths > 0):
            raise InvalidInputError("widths must be strictly positive")
        if not (np.all(np.isfinite(centers)) and np.all(np.isfinite(weights))):
            raise InvalidInputError("centers and weights must be finite")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "weights", weights)

    @property
    def n_centers(self):
        return self.centers.shape[0]

    @property
    def dim(self):
        return self.centers.shape[1]

    def with_weights(self, weights):
        return replace(self, weights=np.asarray(weights, dtype=float))

    def same_architecture(self, other):
        """True if both models share centers and widths exactly."""
        return (
            self.centers.shape == other.centers.shape
            and np.array_equal(self.centers, other.centers)
            and np.array_equal(self.widths, other.widths)
        )


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    noise_sigma: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise InvalidInputError("X must be a non-empty (n, d) array")
        if y.shape[0] != X.shape[0]:
            raise InvalidInputError("X and y disagree in length")
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("X contains non-finite entries")
        if self.noise_sigma < 0:
            raise InvalidInputError("noise_sigma must be nonnegative")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.X.shape[0]


CENTER_KINDS = ("uniform-grid", "k-means", "sample-subset")
WIDTH_RULES = ("constant", "nearest-neighbor")


@dataclass(frozen=True)
class CenterPolicy:
    """How to place centers and pick widths.

    ``width_rule="constant"`` uses ``sigma`` for every center;
    ``"nearest-neighbor"`` sets ``sigma_j = factor * min_k ||mu_j - mu_k||``.
    ``bounds`` optionally fixes the box of a uniform grid, otherwise the data
    bounding box is used.
    """

    kind: str = "k-means"
    width_rule: str = "constant"
    sigma: float = 1.0
    factor: float = 1.0
    bounds: Optional[tuple] = None
    max_iter: int = 100

    def __post_init__(self):
        if self.kind not in CENTER_KINDS:
            raise InvalidInputError(f"unknown center policy {self.kind!r}")
        if self.width_rule not in WIDTH_RULES:
            raise InvalidInputError(f"unknown width rule {self.width_rule!r}")
        if not self.sigma > 0 or not self.factor > 0:
            raise InvalidInputError("sigma and factor must be positive")


def _as_inputs(X, d=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        # a bare vector is a batch of scalars for 1-d models, one point otherwise
        X = X[:, None] if d in (None, 1) else X[None, :]
    if d is not None and X.shape[1] != d:
        raise InvalidInputError(f"inputs have {X.shape[1]} columns, model expects {d}")
    return X


def _gaussians(model, X):
    sq = cdist(X, model.centers, "sqeuclidean")
    return np.exp(-sq / model.widths**2)


def feature_map(model, X):
    """
    Feature matrix ``[1, phi_1(X), ..., phi_m(X)]`` of shape ``(n, m + 1)``.
    """
    X = _as_inputs(X, model.dim)
    return np.hstack([np.ones((X.shape[0], 1)), _gaussians(model, X)])


def feature_map_derivative(model, X, axis):
    """
    Partial derivatives of the feature columns with respect to ``x[axis]``.

    Column 0 (bias) is zero; column ``j`` is
    ``phi_j(x) * (-2 (x_k - mu_jk) / sigma_j^2)``.
    """
    X = _as_inputs(X, model.dim)
    if not 0 <= axis < model.dim:
        raise InvalidInputError(f"axis {axis} out of range for {model.dim}-d inputs")
    phi = _gaussians(model, X)
    diff = X[:, axis][:, None] - model.centers[:, axis][None, :]
    dphi = phi * (-2.0 * diff / model.widths**2)
    return np.hstack([np.zeros((X.shape[0], 1)), dphi])


def predict(model, X):
    return feature_map(model, X) @ model.weights


def predict_derivative(model, X, axis):
    """Analytic ``d f / d x_axis`` of the network output."""
    return feature_map_derivative(model, X, axis) @ model.weights


def _nearest_neighbor_widths(centers, factor):
    if centers.shape[0] < 2:
        raise InvalidInputError("nearest-neighbor widths need at least two centers")
    dist = cdist(centers, centers)
    np.fill_diagonal(dist, np.inf)
    nn = dist.min(axis=1)
    if np.any(nn <= 0):
        raise InvalidInputError("duplicate centers give zero nearest-neighbor width")
    return factor * nn


def _grid_centers(X, m, bounds):
    d = X.shape[1]
    per_axis = int(round(m ** (1.0 / d)))
    if per_axis**d != m:
        raise InvalidInputError(f"uniform grid needs m to be a perfect {d}-th power, got {m}")
    if bounds is None:
        lo, hi = X.min(axis=0), X.max(axis=0)
    else:
        lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), (d,)) for b in bounds)
    axes = [np.linspace(lo[k], hi[k], per_axis) for k in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([g.ravel() for g in mesh])


def _kmeans_centers(X, m, seed, max_iter):
    uniq = np.unique(X, axis=0)
    if m >= uniq.shape[0]:
        if m > uniq.shape[0]:
            logger.warning("k-means: %d centers requested, only %d distinct points", m, uniq.shape[0])
        return uniq
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        centers, _ = kmeans2(X, m, iter=max_iter, minit="++", seed=np.random.default_rng(seed))
    order = np.lexsort(centers.T[::-1])
    return centers[order]


def init_centers(X, m, policy=None, seed=0):
    """
    Place ``m`` centers for the inputs ``X`` and return a zero-weight model.

    Deterministic for a fixed ``seed``. ``k-means`` runs seeded k-means++ and
    Lloyd iterations (``policy.max_iter``); if ``m`` reaches the number of
    distinct points the distinct points themselves are returned, sorted.
    """
    policy = policy or CenterPolicy()
    X = _as_inputs(X)
    n = X.shape[0]
    if m < 1:
        raise InvalidInputError("m must be at least 1")
    if policy.kind in ("k-means", "sample-subset") and m > n:
        raise InvalidInputError(f"cannot place {m} centers from {n} samples")

    if policy.kind == "uniform-grid":
        centers = _grid_centers(X, m, policy.bounds)
    elif policy.kind == "k-means":
        centers = _kmeans_centers(X, m, seed, policy.max_iter)
    else:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(n, size=m, replace=False))
        centers = X[idx].copy()

    if policy.width_rule == "constant":
        widths = np.full(centers.shape[0], float(policy.sigma))
    else:
        widths = _nearest_neighbor_widths(centers, policy.factor)
    return RbfModel(centers, widths, np.zeros(centers.shape[0] + 1))


def fit_unconstrained(X, y, model, rcond=numerics.DEFAULT_RCOND):
    """Least-squares weights ``W = (Phi^T Phi)^+ Phi^T y`` for fixed centers/widths."""
    phi = feature_map(model, X)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != phi.shape[0]:
        raise InvalidInputError("X and y disagree in length")
    w = numerics.weighted_least_squares(phi, y, np.ones_like(y), rcond)
    return model.with_weights(w)


# ---------------------------------------------------------------------------
# text serialization


def _fmt_row(values):
    return " ".join(repr(float(v)) for v in values)


def model_to_lines(model):
    lines = [f"{model.n_centers} {model.dim}"]
    lines += [_fmt_row(c) for c in model.centers]
    lines.append(_fmt_row(model.widths))
    lines.append(_fmt_row(model.weights))
    return lines


def model_from_lines(lines):
    """Parse the block written by :func:`model_to_lines`; returns (model, n_consumed)."""
    try:
        m, d = (int(t) for t in lines[0].split())
        centers = np.array([[float(t) for t in lines[1 + j].split()] for j in range(m)])
        widths = np.array([float(t) for t in lines[1 + m].split()])
        weights = np.array([float(t) for t in lines[2 + m].split()])
    except (IndexError, ValueError) as exc:
        raise InvalidInputError(f"malformed model text: {exc}") from exc
    if centers.shape != (m, d):
        raise InvalidInputError("center block does not match header")
    return RbfModel(centers, widths, weights), m + 3


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(model_to_lines(model)) + "\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    model, _ = model_from_lines(lines)
    return model
