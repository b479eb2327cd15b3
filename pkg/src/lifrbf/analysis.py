"""
Coupling-form diagnostics comparing constrained and unconstrained networks.

For a blended (LIS value) model with network output ``f0``::

    f = (1 - psi) f0 + gs,   gs = psi f_C          (original coupling)
    f = f0 + Gs,             Gs = psi (f_C - f0)   (alternative coupling)

and for any constrained model paired with the unconstrained network ``f_wc``
sharing its centers and widths::

    f = f_wc + fm                                  (generic coupling)
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bench, gcnn, rbf
from .errors import InvalidInputError, UnsupportedOperationError


@dataclass(frozen=True)
class CouplingReport:
    grid: np.ndarray
    f0: np.ndarray
    gs: np.ndarray
    Gs: np.ndarray
    f: np.ndarray
    psi: np.ndarray


@dataclass(frozen=True)
class WeightChangeReport:
    """``delta_w[0]`` is the bias change; ``normalized`` is all zero when ``is_zero``."""

    delta_w: np.ndarray
    normalized: np.ndarray
    center_coords: np.ndarray
    is_zero: bool

    @property
    def bias_index(self):
        return 0


def coupling_decompose(model, grid):
    """
    Split a blended model's prediction into network and coupling terms on ``grid``.
    """
    if model.scheme not in gcnn.BLENDED_SCHEMES:
        raise UnsupportedOperationError(
            f"scheme {model.scheme} has no explicit coupling form; use generic_modification"
        )
    X = rbf._as_inputs(grid, model.base.dim)
    f0 = rbf.predict(model.base, X)
    psi, f_c, _ = gcnn.blend_terms(gcnn._value_specs(model), X)
    gs = psi * f_c
    Gs = psi * (f_c - f0)
    return CouplingReport(X, f0, gs, Gs, f0 + Gs, psi)


def _base(model):
    return model.base if isinstance(model, gcnn.GcnnModel) else model


def _check_pair(constrained, unconstrained):
    a, b = _base(constrained), _base(unconstrained)
    if not a.same_architecture(b):
        raise InvalidInputError("paired networks must share centers and widths")
    return a, b


def generic_modification(constrained, unconstrained, grid):
    """``fm = f - f_wc`` on ``grid``; both networks must share centers and widths."""
    _, b = _check_pair(constrained, unconstrained)
    X = rbf._as_inputs(grid, b.dim)
    return gcnn.predict_constrained(constrained, X) - rbf.predict(b, X)


def weight_changes(constrained, unconstrained):
    """
    ``delta_w = W_constrained - W_unconstrained`` and its normalization by the
    largest absolute entry.
    """
    a, b = _check_pair(constrained, unconstrained)
    delta = a.weights - b.weights
    peak = np.max(np.abs(delta))
    if peak == 0:
        return WeightChangeReport(delta, np.zeros_like(delta), a.centers, True)
    return WeightChangeReport(delta, delta / peak, a.centers, False)


def locality_ratio(fm, grid, points, radius):
    """
    Fraction of ``sum |fm|`` carried by grid points within ``radius`` of any of
    ``points``. Returns 0 when ``fm`` vanishes.
    """
    X = np.atleast_2d(np.asarray(grid, dtype=float))
    if X.shape[0] == 1 and np.ndim(grid) == 1:
        X = X.T
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[1] != X.shape[1]:
        P = P.reshape(-1, X.shape[1])
    dist = np.min(np.linalg.norm(X[:, None, :] - P[None, :, :], axis=2), axis=1)
    mass = np.abs(np.asarray(fm, dtype=float))
    total = mass.sum()
    return float(mass[dist <= radius].sum() / total) if total > 0 else 0.0


# ---------------------------------------------------------------------------
# experiment drivers


def _sinc_grid(n, specs):
    grid = np.linspace(-10.0, 10.0, n)
    pts = np.concatenate([s.set.points[:, 0] for s in specs])
    return np.unique(np.concatenate([grid, pts]))


def coupling_study(config):
    """
    Fit the configured methods on trial-0 Sinc data and evaluate the coupling
    terms on an even grid (plus the constraint points).

    Returns ``{method: dict of series}``; every method gets ``x``, ``f0``
    (its own network output), ``f_wc``, ``f`` and ``fm``; blended methods also
    get ``gs``, ``Gs`` and ``psi``, and every method gets the scalar
    ``locality`` (share of ``|fm|`` within ``10 * gamma`` of a constraint).
    """
    if config.experiment != "sinc":
        raise InvalidInputError("coupling study is defined for the Sinc experiment")
    train, _, specs = bench._generate(config, 0)
    base = bench.base_model(config, train.X)
    ref = rbf.fit_unconstrained(train.X, train.y, base)
    grid = _sinc_grid(config.grid_points, specs)
    pts = np.concatenate([s.set.points[:, 0] for s in specs])
    out = {}
    for method in config.methods:
        if method == "rbfnn":
            continue
        model = bench.fit_method(config, method, train, specs, base)
        fm = generic_modification(model, ref, grid)
        series = {
            "x": grid,
            "f0": rbf.predict(model.base, grid),
            "f_wc": rbf.predict(ref, grid),
            "f": gcnn.predict_constrained(model, grid),
            "fm": fm,
        }
        if model.scheme in gcnn.BLENDED_SCHEMES:
            rep = coupling_decompose(model, grid)
            series.update(gs=rep.gs, Gs=rep.Gs, psi=rep.psi)
        series["locality"] = locality_ratio(fm, grid, pts, 10 * config.gamma)
        out[method] = series
    return out


def weight_study(config):
    """
    Weight changes between each constrained method and the unconstrained
    network, for every width in ``config.sigmas`` (or ``config.sigma``).

    Returns ``{(sigma, method): WeightChangeReport}``.
    """
    if config.experiment != "sinc":
        raise InvalidInputError("weight study is defined for the Sinc experiment")
    sigmas = config.sigmas or (config.sigma,)
    train, _, specs = bench._generate(config, 0)
    out = {}
    for sigma in sigmas:
        base = bench.base_model(config, train.X, sigma=sigma)
        ref = gcnn.initial_weights_from_unconstrained(train.X, train.y, base)
        ref_model = base.with_weights(ref)
        for method in config.methods:
            if method == "rbfnn":
                continue
            model = bench.fit_method(config, method, train, specs, base)
            out[(sigma, method)] = weight_changes(model, ref_model)
    return out


# ---------------------------------------------------------------------------
# CSV output


def _fmt(v):
    return repr(float(v))


def write_coupling_csv(series, path):
    cols = [c for c in ("x", "f0", "gs", "Gs", "fm", "f_wc", "f", "psi") if c in series]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in zip(*(series[c] for c in cols)):
            w.writerow([_fmt(v) for v in row])


def write_weights_csv(report, path):
    d = report.center_coords.shape[1]
    coord_cols = ["center_coord"] if d == 1 else [f"center_coord_{k}" for k in range(d)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["center_index"] + coord_cols + ["delta_w", "normalized"])
        # row 0 is the bias weight; it has no center
        w.writerow(["bias"] + ["nan"] * d + [_fmt(report.delta_w[0]), _fmt(report.normalized[0])])
        for j, c in enumerate(report.center_coords, start=1):
            w.writerow([j] + [_fmt(v) for v in c]
                       + [_fmt(report.delta_w[j]), _fmt(report.normalized[j])])


def write_coupling_outputs(config, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    study = coupling_study(config)
    paths = []
    with open(out / "coupling_locality.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "locality_ratio"])
        for method, series in study.items():
            w.writerow([method, _fmt(series["locality"])])
            p = out / f"coupling_{method}.csv"
            write_coupling_csv(series, p)
            paths.append(p)
    paths.append(out / "coupling_locality.csv")
    return paths


def write_weight_outputs(config, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for (sigma, method), rep in weight_study(config).items():
        p = out / f"weights_sigma{sigma:g}_{method}.csv"
        write_weights_csv(rep, p)
        paths.append(p)
    return paths
