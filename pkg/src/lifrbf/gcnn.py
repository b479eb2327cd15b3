"""
Constrained RBF fitters.

Locally imposing schemes (LIS) blend the network with the constraint target
through the LIF weight ``psi``::

    f_WC(x) = (1 - psi(x)) * f(x) + psi(x) * f_C(x)

so that ``f_WC == f_C`` wherever ``psi == 1``, i.e. on the constraint set.
Only the output weights are solved for; centers and widths stay fixed.

The globally imposing baseline solves the least-squares problem with hard
point-wise equality constraints through a KKT system.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import constraints as cst
from . import lif, numerics, rbf
from .errors import InfeasibleError, InvalidInputError, NotFittedError

SCHEMES = (
    "lis-value",
    "lis-derivative",
    "lis-derivative-integrated",
    "gis-lagrange",
    "unconstrained",
)
BLENDED_SCHEMES = ("lis-value", "lis-derivative-integrated")


@dataclass(frozen=True)
class GcnnModel:
    """
    A fitted network together with the constraints it was fitted under.

    ``specs`` holds the constraint specs of LIS schemes; ``point_constraints``
    holds ``(point, value)`` pairs of the GIS baseline. ``multipliers`` and
    ``rank_deficient`` record the KKT solve for GIS fits.
    """

    base: rbf.RbfModel
    scheme: str
    specs: tuple = ()
    point_constraints: tuple = ()
    fitted: bool = True
    multipliers: Optional[np.ndarray] = field(default=None, compare=False)
    rank_deficient: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidInputError(f"unknown scheme {self.scheme!r}")
        object.__setattr__(self, "specs", tuple(self.specs))
        object.__setattr__(self, "point_constraints", tuple(self.point_constraints))
        kinds = {s.target.kind for s in self.specs}
        allowed = {
            "lis-value": {"value"},
            "lis-derivative": {"derivative", "derivative-integrated"},
            "lis-derivative-integrated": {"derivative-integrated"},
            "gis-lagrange": set(),
            "unconstrained": set(),
        }[self.scheme]
        if not kinds <= allowed:
            raise InvalidInputError(f"scheme {self.scheme} cannot carry targets of kind {sorted(kinds)}")

    @property
    def weights(self):
        return self.base.weights


def _value_specs(model):
    if model.scheme == "lis-derivative-integrated":
        return [cst.ConstraintSpec(s.set, s.target.as_value(), s.gamma) for s in model.specs]
    return list(model.specs)


def _inputs(X, d):
    return rbf._as_inputs(X, d)


def _active_targets(specs, X, active):
    """Evaluate each point's active target at its projection onto that spec's set."""
    out = np.empty(X.shape[0])
    for i, spec in enumerate(specs):
        idx = np.flatnonzero(active == i)
        if idx.size:
            out[idx] = spec.target(spec.set.project(X[idx]))
    return out


def blend_terms(specs, X):
    """
    LIF weights and projected targets at ``X``.

    Returns ``(psi, f_c, active)``; with no specs ``psi`` and ``f_c`` are zero.
    """
    X = np.asarray(X, dtype=float)
    if not specs:
        z = np.zeros(X.shape[0])
        return z, z.copy(), np.zeros(X.shape[0], dtype=int)
    weight, active = lif.aggregate_psi(specs, X)
    return weight, _active_targets(specs, X, active), active


def predict_constrained(model, X):
    """
    Network output, blended with the constraint target for LIS value schemes.
    """
    if not model.fitted:
        raise NotFittedError("model has not been fitted")
    X = _inputs(X, model.base.dim)
    f0 = rbf.predict(model.base, X)
    if model.scheme not in BLENDED_SCHEMES or not model.specs:
        return f0
    weight, f_c, _ = blend_terms(_value_specs(model), X)
    return (1.0 - weight) * f0 + weight * f_c


def _target_partial(spec, X, axis, step=1e-6):
    """d/dx_axis of ``target(project(x))``."""
    cset, target = spec.set, spec.target
    if isinstance(cset, cst.PointList):
        return np.zeros(X.shape[0])  # projection is locally constant
    if isinstance(cset, cst.AxisPlane) and axis == cset.axis:
        return np.zeros(X.shape[0])
    proj = cset.project(X)
    grad = getattr(target, "grad", None)
    if grad is not None and isinstance(cset, cst.AxisPlane):
        g = np.asarray(grad(proj), dtype=float)[:, axis]
        if np.all(np.isfinite(g)):
            return g
    hi, lo = X.copy(), X.copy()
    hi[:, axis] += step
    lo[:, axis] -= step
    return (target(cset.project(hi)) - target(cset.project(lo))) / (2 * step)


def predict_constrained_derivative(model, X, axis):
    """
    Analytic ``d f / d x_axis`` of :func:`predict_constrained`.

    For blended schemes this is
    ``(1 - psi) f0' - psi' f0 + psi' f_C + psi f_C'`` evaluated per active
    constraint.
    """
    if not model.fitted:
        raise NotFittedError("model has not been fitted")
    X = _inputs(X, model.base.dim)
    df0 = rbf.predict_derivative(model.base, X, axis)
    if model.scheme not in BLENDED_SCHEMES or not model.specs:
        return df0
    specs = _value_specs(model)
    f0 = rbf.predict(model.base, X)
    weight, active = lif.aggregate_psi(specs, X)
    out = np.empty(X.shape[0])
    for i, spec in enumerate(specs):
        idx = np.flatnonzero(active == i)
        if not idx.size:
            continue
        xi = X[idx]
        proj = spec.set.project(xi)
        dpsi = lif.psi_gradient(xi, proj, spec.gamma)[:, axis]
        f_c = spec.target(proj)
        df_c = _target_partial(spec, xi, axis)
        w = weight[idx]
        out[idx] = (1.0 - w) * df0[idx] + dpsi * (f_c - f0[idx]) + w * df_c
    return out


# ---------------------------------------------------------------------------
# fitters


def _check_data(X, y, base):
    X = _inputs(X, base.dim)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.shape[0] == 0:
        raise InvalidInputError("no training data")
    if y.shape[0] != X.shape[0]:
        raise InvalidInputError("X and y disagree in length")
    return X, y


def fit_lis_value(X, y, base, specs, rcond=numerics.DEFAULT_RCOND):
    """
    Fit the blended predictor to data under value constraints.

    Minimizes ``||y - f_WC(X)||^2``. Writing ``D = diag(1 - psi(x_i))`` this
    is the linear least-squares problem with design ``D Phi`` and right-hand
    side ``y - psi * f_C``, whose minimum-norm solution is
    ``(Phi^T D^2 Phi)^+ Phi^T D (y - psi * f_C)``.
    """
    specs = list(specs)
    for s in specs:
        if s.target.kind != "value":
            raise InvalidInputError(f"fit_lis_value needs value targets, got {s.target.kind}")
    cst.validate_specs(specs)
    X, y = _check_data(X, y, base)
    phi = rbf.feature_map(base, X)
    weight, f_c, _ = blend_terms(specs, X)
    design = (1.0 - weight)[:, None] * phi
    w = numerics.weighted_least_squares(design, y - weight * f_c, np.ones_like(y), rcond)
    return GcnnModel(base.with_weights(w), "lis-value", specs)


def fit_lis_derivative(X, y, base, specs, axis=None, rcond=numerics.DEFAULT_RCOND):
    """
    Soft derivative constraints.

    Minimizes
    ``sum_i (1 - psi_i) (y_i - f(x_i))^2 + sum_i psi_i (f_k(x_i) - g(x_i))^2``
    where ``f_k`` is the partial derivative along ``axis`` and ``g`` is the
    derivative target evaluated at the projection of ``x_i`` onto the
    constraint set. Predictions are the plain network output.
    """
    specs = list(specs)
    axes = set()
    for s in specs:
        if s.target.kind not in ("derivative", "derivative-integrated"):
            raise InvalidInputError(f"fit_lis_derivative needs derivative targets, got {s.target.kind}")
        axes.add(s.target.axis)
    if len(axes) > 1:
        raise InvalidInputError("all derivative targets must share one axis")
    if axes:
        (spec_axis,) = axes
        if axis is not None and axis != spec_axis:
            raise InvalidInputError(f"axis {axis} does not match target axis {spec_axis}")
        axis = spec_axis
    X, y = _check_data(X, y, base)
    phi = rbf.feature_map(base, X)
    if specs:
        weight, g, _ = blend_terms(specs, X)
        dphi = rbf.feature_map_derivative(base, X, axis)
    else:
        weight = g = np.zeros(X.shape[0])
        dphi = np.zeros_like(phi)
    design = np.vstack([phi, dphi])
    rhs = np.concatenate([y, g])
    row_w = np.concatenate([1.0 - weight, weight])
    w = numerics.weighted_least_squares(design, rhs, row_w, rcond)
    return GcnnModel(base.with_weights(w), "lis-derivative", specs)


def fit_lis_integrated(X, y, base, specs, rcond=numerics.DEFAULT_RCOND):
    """
    Integrable derivative constraints: fit the value constraint given by each
    target's antiderivative, then blend as for value constraints.

    The integration constant is taken as zero.
    """
    specs = list(specs)
    for s in specs:
        if s.target.kind != "derivative-integrated":
            raise InvalidInputError("fit_lis_integrated needs targets carrying an antiderivative")
    value_specs = [cst.ConstraintSpec(s.set, s.target.as_value(), s.gamma) for s in specs]
    fitted = fit_lis_value(X, y, base, value_specs, rcond)
    return GcnnModel(fitted.base, "lis-derivative-integrated", specs)


def point_constraints_from_specs(specs):
    """Expand point-list value specs into ``(point, value)`` pairs."""
    pairs = []
    for s in specs:
        if not isinstance(s.set, cst.PointList) or s.target.kind != "value":
            raise InvalidInputError("only point-list value constraints are point-wise")
        vals = s.target(s.set.points)
        pairs += [(p.copy(), float(v)) for p, v in zip(s.set.points, vals)]
    return pairs


def fit_gis_lagrange(X, y, base, point_constraints, rcond=numerics.DEFAULT_RCOND, tol=1e-8):
    """
    Least squares with hard point-wise constraints ``f(x_c) = v_c``.

    One Lagrange multiplier per constraint point; the saddle-point system is
    solved exactly. Continuous constraints must be discretized by the caller.
    """
    X, y = _check_data(X, y, base)
    pcs = [(np.atleast_1d(np.asarray(p, dtype=float)), float(v)) for p, v in point_constraints]
    if not pcs:
        return GcnnModel(rbf.fit_unconstrained(X, y, base, rcond), "gis-lagrange")
    if len(pcs) > base.n_centers + 1:
        raise InfeasibleError(f"{len(pcs)} constraints exceed {base.n_centers + 1} weights")
    pts = np.vstack([p for p, _ in pcs])
    vals = np.array([v for _, v in pcs])
    phi = rbf.feature_map(base, X)
    a = rbf.feature_map(base, pts)
    res = numerics.solve_kkt(phi.T @ phi, phi.T @ y, a, vals, rcond)
    resid = np.max(np.abs(a @ res.weights - vals))
    if resid > tol * max(1.0, np.max(np.abs(vals))):
        raise InfeasibleError(f"constraints are inconsistent (residual {resid:.3g})")
    return GcnnModel(
        base.with_weights(res.weights),
        "gis-lagrange",
        point_constraints=tuple(pcs),
        multipliers=res.multipliers,
        rank_deficient=res.rank_deficient,
    )


def fit_unconstrained(X, y, base, rcond=numerics.DEFAULT_RCOND):
    X, y = _check_data(X, y, base)
    return GcnnModel(rbf.fit_unconstrained(X, y, base, rcond), "unconstrained")


def initial_weights_from_unconstrained(X, y, model, rcond=numerics.DEFAULT_RCOND):
    """
    Weights of the unconstrained network sharing ``model``'s centers and widths.

    This is the reference network against which weight changes of a
    constrained fit are measured.
    """
    base = model.base if isinstance(model, GcnnModel) else model
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise InvalidInputError("no training data")
    return rbf.fit_unconstrained(X, y, base, rcond).weights


def unfitted(base, scheme="unconstrained", specs=()):
    """A placeholder model that refuses to predict until fitted."""
    return GcnnModel(base, scheme, specs, fitted=False)


# ---------------------------------------------------------------------------
# serialization


def model_to_lines(model):
    lines = rbf.model_to_lines(model.base)
    lines.append(f"scheme {model.scheme}")
    for s in model.specs:
        lines.append("constraint " + cst.spec_to_descriptor(s))
    for p, v in model.point_constraints:
        lines.append("point " + ",".join(repr(float(t)) for t in p) + f" value={v!r}")
    return lines


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(model_to_lines(model)) + "\n")


def load_model(path):
    """Read a model file written by :func:`save_model` or :func:`lifrbf.rbf.save_model`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    base, used = rbf.model_from_lines(lines)
    scheme, specs, pcs = "unconstrained", [], []
    for ln in lines[used:]:
        head, _, rest = ln.partition(" ")
        if head == "scheme":
            scheme = rest.strip()
        elif head == "constraint":
            specs.append(cst.spec_from_descriptor(rest))
        elif head == "point":
            coords, _, val = rest.partition(" value=")
            try:
                pcs.append((np.array([float(t) for t in coords.split(",")]), float(val)))
            except ValueError as exc:
                raise InvalidInputError(f"malformed point constraint {ln!r}") from exc
        else:
            raise InvalidInputError(f"unexpected line in model file: {ln!r}")
    return GcnnModel(base, scheme, specs, pcs)
