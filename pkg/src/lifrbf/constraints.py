"""
Equality-constraint descriptions: where a constraint holds (the set ``C``),
how far a point is from it, and what the network must equal there.

Targets are stored as vectorized callables taking an ``(n, d)`` array and
returning ``(n,)`` values. A target defined only on ``C`` is extended off ``C``
by evaluating it at the projected point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInputError, UnsupportedOperationError


def _points(x, d=None):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        x = x[:, None] if d == 1 else x[None, :]
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("points must be finite")
    if d is not None and x.shape[1] != d:
        raise InvalidInputError(f"points have {x.shape[1]} coordinates, constraint set has {d}")
    return x


# ---------------------------------------------------------------------------
# constraint sets


class PointList:
    """A finite set of points."""

    kind = "point-list"

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1, 1)
        elif pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[0] == 0:
            raise InvalidInputError("point-list constraint needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("constraint points must be finite")
        self.points = pts

    @property
    def dim(self):
        return self.points.shape[1]

    def _nearest(self, x):
        diff = x[:, None, :] - self.points[None, :, :]
        dist = np.sqrt(np.sum(diff**2, axis=2))
        idx = np.argmin(dist, axis=1)  # first minimum = lowest index
        return dist[np.arange(x.shape[0]), idx], idx

    def distance(self, x):
        return self._nearest(x)[0]

    def project(self, x):
        return self.points[self._nearest(x)[1]].copy()

    def __repr__(self):
        return f"PointList({self.points.tolist()})"


class AxisPlane:
    """The hyperplane ``x[axis] == level`` (axes are 0-based)."""

    kind = "axis-plane"

    def __init__(self, axis, level=0.0, dim=None):
        if axis < 0 or (dim is not None and axis >= dim):
            raise InvalidInputError(f"axis {axis} out of range")
        self.axis = int(axis)
        self.level = float(level)
        self._dim = dim

    @property
    def dim(self):
        return self._dim

    def distance(self, x):
        if self.axis >= x.shape[1]:
            raise InvalidInputError(f"axis {self.axis} out of range for {x.shape[1]}-d points")
        return np.abs(x[:, self.axis] - self.level)

    def project(self, x):
        if self.axis >= x.shape[1]:
            raise InvalidInputError(f"axis {self.axis} out of range for {x.shape[1]}-d points")
        p = x.copy()
        p[:, self.axis] = self.level
        return p

    def __repr__(self):
        return f"AxisPlane(axis={self.axis}, level={self.level})"


class PredicateRegion:
    """A region known only through a distance oracle (and optionally a projector)."""

    kind = "predicate-region"

    def __init__(self, distance_fn, project_fn=None, dim=None):
        self._distance_fn = distance_fn
        self._project_fn = project_fn
        self._dim = dim

    @property
    def dim(self):
        return self._dim

    def distance(self, x):
        d = np.asarray(self._distance_fn(x), dtype=float).reshape(-1)
        if np.any(d < 0):
            raise InvalidInputError("distance oracle returned a negative value")
        return d

    def project(self, x):
        if self._project_fn is None:
            raise UnsupportedOperationError("predicate-region set has no projection oracle")
        return np.asarray(self._project_fn(x), dtype=float).reshape(x.shape)


def _batch(cset, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return x.reshape(1, 1), "scalar"
    if x.ndim == 1:
        # a bare vector is a batch of scalars for 1-d sets, otherwise one point
        return (x[:, None], "batch1d") if cset.dim == 1 else (x[None, :], "point")
    return x, "batch"


def distance(cset, x):
    """Euclidean distance from ``x`` (a point or a batch of points) to the set."""
    pts, shape = _batch(cset, x)
    d = cset.distance(_points(pts, cset.dim))
    return float(d[0]) if shape in ("scalar", "point") else d


def project(cset, x):
    """Nearest point of the set (ties go to the lowest index)."""
    pts, shape = _batch(cset, x)
    p = cset.project(_points(pts, cset.dim))
    if shape == "scalar":
        return float(p[0, 0])
    if shape == "point":
        return p[0]
    if shape == "batch1d":
        return p[:, 0]
    return p


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class ValueTarget:
    """``f(x) = fn(x)`` on C. ``grad`` (optional) returns the ``(n, d)`` gradient of fn."""

    fn: Callable
    name: str = "<callable>"
    grad: Optional[Callable] = None
    kind = "value"

    def __call__(self, x):
        return np.asarray(self.fn(x), dtype=float).reshape(-1)


@dataclass(frozen=True)
class DerivativeTarget:
    """``d f / d x[axis] = fn(x)`` on C."""

    axis: int
    fn: Callable
    name: str = "<callable>"
    kind = "derivative"

    def __call__(self, x):
        return np.asarray(self.fn(x), dtype=float).reshape(-1)


@dataclass(frozen=True)
class IntegratedTarget:
    """A derivative target that also carries its antiderivative along ``axis``."""

    axis: int
    fn: Callable
    antiderivative: Callable
    name: str = "<callable>"
    kind = "derivative-integrated"

    def __call__(self, x):
        return np.asarray(self.fn(x), dtype=float).reshape(-1)

    def as_value(self):
        """The value target ``F0`` whose ``axis`` derivative is ``fn``."""
        axis, fn, f0 = self.axis, self.fn, self.antiderivative

        def grad(x):
            g = np.full(x.shape, np.nan)
            g[:, axis] = np.asarray(fn(x), dtype=float).reshape(-1)
            return g

        return ValueTarget(f0, name=self.name, grad=grad)


@dataclass(frozen=True)
class ConstraintSpec:
    """A constraint set, its target and the locality parameter ``gamma``."""

    set: object
    target: object
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidInputError("gamma must be positive")
        axis = getattr(self.target, "axis", None)
        if axis is not None and self.set.dim is not None and axis >= self.set.dim:
            raise InvalidInputError(f"target axis {axis} out of range")

    @property
    def kind(self):
        return self.target.kind


def validate_specs(specs, atol=0.0):
    """
    Reject value constraints that demand different values at a shared point.

    Only point-vs-point and point-vs-plane coincidences are checked; two
    planes are assumed to agree on their intersection.
    """
    vals = [(i, s) for i, s in enumerate(specs) if s.target.kind != "derivative"]
    for a in range(len(vals)):
        for b in range(a + 1, len(vals)):
            (i, si), (j, sj) = vals[a], vals[b]
            for s_pts, s_other in ((si, sj), (sj, si)):
                if not isinstance(s_pts.set, PointList):
                    continue
                pts = s_pts.set.points
                on_other = s_other.set.distance(pts) == 0
                if not np.any(on_other):
                    continue
                shared = pts[on_other]
                v1 = _value_of(s_pts.target)(shared)
                v2 = _value_of(s_other.target)(s_other.set.project(shared))
                if np.any(np.abs(v1 - v2) > atol):
                    raise InvalidInputError(
                        f"constraints {i} and {j} prescribe different values at {shared.tolist()}"
                    )
    return specs


def _value_of(target):
    return target.as_value() if target.kind == "derivative-integrated" else target


# ---------------------------------------------------------------------------
# named built-in targets (used by configs and model files)


def _constant(value):
    def fn(x):
        return np.full(x.shape[0], value)

    def grad(x):
        return np.zeros(x.shape)

    return ValueTarget(fn, name=f"constant:{value!r}", grad=grad)


def _sinc_fn(x):
    t = x[:, 0]
    return np.sinc(t / math.pi)


def _x2_cubed(x):
    return x[:, 1] ** 3


def _three_x2_squared(x):
    return 3.0 * x[:, 1] ** 2


def _pde_solution(x):
    return np.exp(-x[:, 0]) * (x[:, 0] + x[:, 1] ** 3)


def _grad_x2_cubed(x):
    g = np.zeros(x.shape)
    g[:, 1] = 3.0 * x[:, 1] ** 2
    return g


_BUILTINS = {
    "sinc": lambda: ValueTarget(_sinc_fn, name="sinc"),
    "x2_cubed": lambda: ValueTarget(_x2_cubed, name="x2_cubed", grad=_grad_x2_cubed),
    "three_x2_squared": lambda: DerivativeTarget(1, _three_x2_squared, name="three_x2_squared"),
    "three_x2_squared_integrated": lambda: IntegratedTarget(
        1, _three_x2_squared, _x2_cubed, name="three_x2_squared_integrated"
    ),
}


def builtin_target(name):
    """
    Look up a named target.

    ``constant:<v>`` builds a constant value target. Other names:
    ``sinc``, ``x2_cubed``, ``three_x2_squared`` (derivative along axis 1) and
    ``three_x2_squared_integrated`` (same, with antiderivative ``x2_cubed``).
    """
    if name.startswith("constant:"):
        try:
            return _constant(float(name.split(":", 1)[1]))
        except ValueError as exc:
            raise InvalidInputError(f"bad constant target {name!r}") from exc
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise InvalidInputError(f"unknown target {name!r}") from None


def builtin_target_names():
    return sorted(_BUILTINS) + ["constant:<value>"]


# ---------------------------------------------------------------------------
# descriptor strings (one line per constraint in model files)


def spec_to_descriptor(spec):
    s = spec.set
    parts = [s.kind, f"gamma={spec.gamma!r}", f"target={spec.target.name}"]
    if isinstance(s, PointList):
        pts = ";".join(",".join(repr(float(v)) for v in p) for p in s.points)
        parts.append(f"points={pts}")
    elif isinstance(s, AxisPlane):
        parts += [f"axis={s.axis}", f"level={s.level!r}"]
        if s.dim is not None:
            parts.append(f"dim={s.dim}")
    else:
        raise UnsupportedOperationError("predicate-region constraints cannot be serialized")
    if spec.target.name.startswith("<"):
        raise UnsupportedOperationError("only named targets can be serialized")
    return " ".join(parts)


def spec_from_descriptor(text):
    tokens = text.split()
    if not tokens:
        raise InvalidInputError("empty constraint descriptor")
    kind, fields = tokens[0], {}
    for tok in tokens[1:]:
        key, _, val = tok.partition("=")
        fields[key] = val
    try:
        gamma = float(fields["gamma"])
        target = builtin_target(fields["target"])
        if kind == "point-list":
            pts = [[float(v) for v in p.split(",")] for p in fields["points"].split(";")]
            cset = PointList(pts)
        elif kind == "axis-plane":
            dim = int(fields["dim"]) if "dim" in fields else None
            cset = AxisPlane(int(fields["axis"]), float(fields.get("level", 0.0)), dim=dim)
        else:
            raise InvalidInputError(f"unsupported constraint kind {kind!r}")
    except (KeyError, ValueError) as exc:
        raise InvalidInputError(f"malformed constraint descriptor {text!r}: {exc}") from exc
    return ConstraintSpec(cset, target, gamma)
