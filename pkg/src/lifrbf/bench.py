"""
Benchmark harness for the Sinc and PDE boundary-value experiments.

Every trial draws its noise (and random test inputs) from a Philox generator
seeded with ``seed + trial``, fits each configured method on the same data and
records the constraint MSE and test MSE.
"""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import constraints as cst
from . import gcnn, rbf
from .errors import ConfigError, InvalidInputError

logger = logging.getLogger(__name__)

EXPERIMENTS = ("sinc", "pde-dirichlet", "pde-neumann", "pde-neumann-integrated")
METHODS = ("rbfnn", "lagrange", "gcnn-ec", "gcnn-ec-i")

SHIPPED_CONFIG_DIR = Path(__file__).parent / "configs"


def sinc(x):
    """``sin(x) / x`` with the removable singularity filled in."""
    return np.sinc(np.asarray(x, dtype=float) / math.pi)


def pde_solution(X):
    """Analytic solution ``exp(-x1) (x1 + x2^3)`` of the benchmark PDE."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.exp(-X[:, 0]) * (X[:, 0] + X[:, 1] ** 3)


def trial_rng(seed, trial=0):
    return np.random.Generator(np.random.Philox(seed + trial))


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "sinc"
    methods: tuple = ("gcnn-ec",)
    n_train: int = 30
    n_test: int = 500
    n_rbf: int = 11
    gamma: float = 1e-4
    noise_sigma: float = 0.05
    trials: int = 100
    seed: int = 0
    center_kind: str = "k-means"
    width_rule: str = "constant"
    sigma: float = 1.0
    width_factor: float = 1.0
    grid_low: float | None = None
    grid_high: float | None = None
    noisy_test: bool = True
    n_pwc: int = 5
    n_boundary: int = 21
    parallel_trials: int = 1
    # analysis-only settings
    sigmas: tuple = ()
    grid_points: int = 2001

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}")
        for name in ("n_train", "n_test", "n_rbf", "trials", "parallel_trials", "grid_points"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.n_pwc < 0 or self.n_boundary < 0:
            raise ConfigError("n_pwc and n_boundary must be nonnegative")
        if not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be nonnegative")
        if self.experiment != "sinc" and self.n_boundary > self.n_test:
            raise ConfigError("n_boundary cannot exceed n_test")

    @property
    def boundary_kind(self):
        return "dirichlet" if self.experiment == "pde-dirichlet" else "neumann"

    def center_policy(self, sigma=None):
        bounds = None
        if self.grid_low is not None and self.grid_high is not None:
            bounds = (self.grid_low, self.grid_high)
        try:
            return rbf.CenterPolicy(
                kind=self.center_kind,
                width_rule=self.width_rule,
                sigma=self.sigma if sigma is None else sigma,
                factor=self.width_factor,
                bounds=bounds,
            )
        except InvalidInputError as exc:
            raise ConfigError(str(exc)) from exc


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _coerce(name, text):
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in types:
        raise ConfigError(f"unknown config key {name!r}")
    kind = types[name]
    text = str(text).strip()
    try:
        if name == "methods":
            return tuple(t.strip() for t in text.split(",") if t.strip())
        if name == "sigmas":
            return tuple(float(t) for t in text.split(",") if t.strip())
        if kind == "int":
            return int(text)
        if kind == "bool":
            return _parse_bool(text)
        if kind == "float | None":
            return None if text.lower() in ("", "none") else float(text)
        if kind == "float":
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def parse_config_text(text, overrides=None):
    """
    Parse ``key = value`` lines (``#`` starts a comment). ``method`` is an
    alias for ``methods``. ``overrides`` take precedence over file values.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        values[key.strip()] = val.strip()
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    if "method" in values:
        values["methods"] = values.pop("method")
    kwargs = {k: _coerce(k, v) for k, v in values.items()}
    if kwargs.get("experiment") == "pde-neumann-integrated" and "methods" not in kwargs:
        kwargs["methods"] = ("gcnn-ec-i",)
    return ExperimentConfig(**kwargs)


def load_config(path, overrides=None):
    """Read a config file; a bare name such as ``table1.cfg`` falls back to the shipped copy."""
    path = Path(path)
    if not path.exists() and path.name == str(path) and (SHIPPED_CONFIG_DIR / path.name).exists():
        path = SHIPPED_CONFIG_DIR / path.name
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, overrides)


def shipped_config(name):
    """Path of a config shipped with the package, e.g. ``"table1.cfg"``."""
    path = SHIPPED_CONFIG_DIR / name
    if not path.exists():
        raise ConfigError(f"no shipped config named {name!r}")
    return path


# ---------------------------------------------------------------------------
# data generators


def sinc_specs(gamma=1e-4):
    """Point constraints ``f(0) = 1`` and ``f(pi/2) = 2/pi``."""
    return [
        cst.ConstraintSpec(cst.PointList([0.0]), cst.builtin_target("constant:1.0"), gamma),
        cst.ConstraintSpec(
            cst.PointList([math.pi / 2]), cst.builtin_target(f"constant:{2 / math.pi!r}"), gamma
        ),
    ]


def gen_sinc(n_train, n_test, noise_sigma, seed, gamma=1e-4, noisy_test=True):
    """
    Sinc regression data on ``[-10, 10]``.

    Training inputs are evenly spaced, test inputs uniform random. With
    ``noisy_test`` the test targets carry the same noise law as the training
    targets; ``Dataset.y`` of the test set is then noisy and the clean values
    are recoverable through :func:`sinc`.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    x = np.linspace(-10.0, 10.0, n_train)
    y = sinc(x) + (rng.normal(0.0, noise_sigma, n_train) if noise_sigma > 0 else 0.0)
    xt = rng.uniform(-10.0, 10.0, n_test)
    yt = sinc(xt)
    if noisy_test and noise_sigma > 0:
        yt = yt + rng.normal(0.0, noise_sigma, n_test)
    train = rbf.Dataset(x[:, None], y, noise_sigma, seed)
    test = rbf.Dataset(xt[:, None], yt, noise_sigma if noisy_test else 0.0, seed)
    return train, test, sinc_specs(gamma)


def pde_boundary(n_points):
    """Even samples of the boundary ``x1 = 0`` (the midpoint when ``n_points == 1``)."""
    x2 = np.array([0.5]) if n_points == 1 else np.linspace(0.0, 1.0, n_points)
    return np.column_stack([np.zeros_like(x2), x2])


def pde_specs(boundary_kind, gamma=0.5):
    plane = cst.AxisPlane(0, 0.0, dim=2)
    if boundary_kind == "dirichlet":
        target = cst.builtin_target("x2_cubed")
    elif boundary_kind == "neumann":
        target = cst.builtin_target("three_x2_squared_integrated")
    else:
        raise InvalidInputError(f"unknown boundary kind {boundary_kind!r}")
    return [cst.ConstraintSpec(plane, target, gamma)]


def gen_pde(boundary_kind, n_train, n_test, noise_sigma, seed, gamma=0.5, n_boundary=21,
            noisy_test=True):
    """
    PDE data on the unit square.

    Training inputs form an even ``k x k`` grid (``n_train == k^2``); the test
    set is ``n_test - n_boundary`` uniform interior points followed by
    ``n_boundary`` even points on ``x1 = 0``. The Neumann spec carries the
    derivative target ``3 x2^2`` along axis 1 and its antiderivative ``x2^3``.
    """
    side = int(round(math.sqrt(n_train)))
    if side * side != n_train:
        raise InvalidInputError(f"n_train must be a perfect square, got {n_train}")
    rng = np.random.Generator(np.random.Philox(seed))
    g = np.linspace(0.0, 1.0, side)
    X = np.column_stack([a.ravel() for a in np.meshgrid(g, g, indexing="ij")])
    y = pde_solution(X) + (rng.normal(0.0, noise_sigma, n_train) if noise_sigma > 0 else 0.0)
    Xt = np.vstack([rng.uniform(0.0, 1.0, (n_test - n_boundary, 2)), pde_boundary(n_boundary)])
    yt = pde_solution(Xt)
    if noisy_test and noise_sigma > 0:
        yt = yt + rng.normal(0.0, noise_sigma, n_test)
    train = rbf.Dataset(X, y, noise_sigma, seed)
    test = rbf.Dataset(Xt, yt, noise_sigma if noisy_test else 0.0, seed)
    return train, test, pde_specs(boundary_kind, gamma)


def discretize_constraint(spec, n_points, lo=0.0, hi=1.0):
    """
    Evenly sample a constraint set and its value target.

    Axis-plane sets are sampled along their free coordinate(s) on ``[lo, hi]``
    (a single point lands on the midpoint); point-list sets return their points.
    Returns a list of ``(point, value)`` pairs.
    """
    if n_points < 1:
        raise InvalidInputError("n_points must be at least 1")
    target = spec.target
    if target.kind == "derivative-integrated":
        target = target.as_value()
    elif target.kind != "value":
        raise InvalidInputError("only value constraints can be discretized into point values")
    cset = spec.set
    if isinstance(cset, cst.PointList):
        pts = cset.points
    elif isinstance(cset, cst.AxisPlane):
        dim = cset.dim or 2
        if dim != 2:
            raise InvalidInputError("axis-plane discretization is implemented for 2-d inputs")
        s = np.array([(lo + hi) / 2]) if n_points == 1 else np.linspace(lo, hi, n_points)
        pts = np.zeros((s.size, 2))
        pts[:, 1 - cset.axis] = s
        pts[:, cset.axis] = cset.level
    else:
        raise InvalidInputError(f"cannot discretize a {cset.kind} set")
    vals = target(pts)
    return [(p.copy(), float(v)) for p, v in zip(pts, vals)]


# ---------------------------------------------------------------------------
# trials


@dataclass
class ExperimentReport:
    """Per-trial metrics for one method plus their mean and (population) std."""

    config: ExperimentConfig
    method: str
    mse_cstr: list = field(default_factory=list)
    mse_test: list = field(default_factory=list)
    mse_test_clean: list = field(default_factory=list)

    @staticmethod
    def _mean(v):
        return math.fsum(v) / len(v)

    @classmethod
    def _std(cls, v):
        mu = cls._mean(v)
        return math.sqrt(math.fsum((x - mu) ** 2 for x in v) / len(v))

    @property
    def n_trials(self):
        return len(self.mse_test)

    def summary(self):
        return {
            "mse_cstr_mean": self._mean(self.mse_cstr),
            "mse_cstr_std": self._std(self.mse_cstr),
            "mse_test_mean": self._mean(self.mse_test),
            "mse_test_std": self._std(self.mse_test),
            "mse_test_clean_mean": self._mean(self.mse_test_clean),
            "mse_test_clean_std": self._std(self.mse_test_clean),
        }


def _generate(config, trial):
    seed = config.seed + trial
    if config.experiment == "sinc":
        return gen_sinc(config.n_train, config.n_test, config.noise_sigma, seed, config.gamma,
                        config.noisy_test)
    return gen_pde(config.boundary_kind, config.n_train, config.n_test, config.noise_sigma, seed,
                   config.gamma, config.n_boundary, config.noisy_test)


def check_method(config, method):
    exp = config.experiment
    if method == "gcnn-ec-i" and exp not in ("pde-neumann", "pde-neumann-integrated"):
        raise ConfigError("gcnn-ec-i applies only to integrable Neumann constraints")
    if method == "lagrange":
        if exp in ("pde-neumann", "pde-neumann-integrated"):
            raise ConfigError("the Lagrange baseline needs point-wise value constraints")
        if exp == "pde-dirichlet" and config.n_pwc < 1:
            raise ConfigError("the Lagrange baseline needs n_pwc >= 1 discretized boundary points")


def base_model(config, train_X=None, sigma=None):
    """Centers/widths shared by every method and trial of an experiment."""
    if train_X is None:
        train_X = _generate(config, 0)[0].X
    try:
        return rbf.init_centers(train_X, config.n_rbf, config.center_policy(sigma), config.seed)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc


def fit_method(config, method, train, specs, base):
    """Fit one method on one training set."""
    check_method(config, method)
    X, y = train.X, train.y
    if method == "rbfnn":
        return gcnn.fit_unconstrained(X, y, base)
    if method == "lagrange":
        if config.experiment == "sinc":
            pcs = gcnn.point_constraints_from_specs(specs)
        else:
            pcs = [pc for s in specs for pc in discretize_constraint(s, config.n_pwc)]
        return gcnn.fit_gis_lagrange(X, y, base, pcs)
    if config.experiment in ("pde-neumann", "pde-neumann-integrated"):
        if method == "gcnn-ec":
            return gcnn.fit_lis_derivative(X, y, base, specs)
        return gcnn.fit_lis_integrated(X, y, base, specs)
    return gcnn.fit_lis_value(X, y, base, specs)


def constraint_points(config, specs):
    """Points at which the constraint MSE is measured, with their targets."""
    if config.experiment == "sinc":
        pts = np.vstack([s.set.points for s in specs])
        vals = np.concatenate([s.target(s.set.points) for s in specs])
        return pts, vals
    pts = pde_boundary(config.n_boundary)
    if config.experiment == "pde-dirichlet":
        return pts, pts[:, 1] ** 3
    return pts, 3.0 * pts[:, 1] ** 2


def constraint_mse(config, model, specs):
    pts, vals = constraint_points(config, specs)
    if config.experiment in ("pde-neumann", "pde-neumann-integrated"):
        pred = gcnn.predict_constrained_derivative(model, pts, axis=1)
    else:
        pred = gcnn.predict_constrained(model, pts)
    return float(np.mean((pred - vals) ** 2))


def _clean_targets(config, X):
    if config.experiment == "sinc":
        return sinc(X[:, 0])
    return pde_solution(X)


def run_trial(config, trial, methods=None, base=None):
    """Metrics ``{method: (mse_cstr, mse_test, mse_test_clean)}`` for one trial."""
    methods = methods or config.methods
    train, test, specs = _generate(config, trial)
    if base is None:
        base = base_model(config, train.X)
    clean = _clean_targets(config, test.X)
    out = {}
    for method in methods:
        model = fit_method(config, method, train, specs, base)
        pred = gcnn.predict_constrained(model, test.X)
        out[method] = (
            constraint_mse(config, model, specs),
            float(np.mean((pred - test.y) ** 2)),
            float(np.mean((pred - clean) ** 2)),
        )
    return out


def _trial_worker(args):
    config, trial, methods, base = args
    return run_trial(config, trial, methods, base)


def run_all(config, methods=None):
    """Run every trial for each method; returns ``{method: ExperimentReport}``."""
    methods = tuple(methods or config.methods)
    for m in methods:
        check_method(config, m)
    base = base_model(config)
    jobs = [(config, t, methods, base) for t in range(config.trials)]
    if config.parallel_trials > 1:
        with ProcessPoolExecutor(max_workers=config.parallel_trials) as pool:
            results = list(pool.map(_trial_worker, jobs))
    else:
        results = [_trial_worker(j) for j in jobs]
    reports = {m: ExperimentReport(config, m) for m in methods}
    for res in results:
        for m in methods:
            c, t, tc = res[m]
            reports[m].mse_cstr.append(c)
            reports[m].mse_test.append(t)
            reports[m].mse_test_clean.append(tc)
    return reports


def run_experiment(config, method=None):
    """Run the configured experiment for a single method (default: the first listed)."""
    method = method or config.methods[0]
    return run_all(config, (method,))[method]


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    return repr(float(v))


def write_report_csv(report, path):
    """Per-trial rows followed by ``mean`` and ``std`` summary rows."""
    s = report.summary()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "mse_cstr", "mse_test", "mse_test_clean"])
        for t, row in enumerate(zip(report.mse_cstr, report.mse_test, report.mse_test_clean)):
            w.writerow([t] + [_fmt(v) for v in row])
        w.writerow(["mean", _fmt(s["mse_cstr_mean"]), _fmt(s["mse_test_mean"]),
                    _fmt(s["mse_test_clean_mean"])])
        w.writerow(["std", _fmt(s["mse_cstr_std"]), _fmt(s["mse_test_std"]),
                    _fmt(s["mse_test_clean_std"])])


def write_summary_csv(reports, path):
    keys = ["mse_cstr_mean", "mse_cstr_std", "mse_test_mean", "mse_test_std",
            "mse_test_clean_mean", "mse_test_clean_std"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "trials"] + keys)
        for method, rep in reports.items():
            s = rep.summary()
            w.writerow([method, rep.n_trials] + [_fmt(s[k]) for k in keys])


def config_to_text(config):
    lines = []
    for k, v in asdict(config).items():
        if isinstance(v, tuple):
            v = ",".join(str(t) for t in v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


def boundary_traces(config, methods=None, trial=0, n_points=101):
    """
    Traces along ``x1 = 0`` (PDE) or over ``[-10, 10]`` (Sinc) for one trial.

    Returns ``(abscissa, {label: values})``; PDE-Neumann traces are
    ``d f / d x2``, all others are function values.
    """
    methods = tuple(methods or config.methods)
    train, _, specs = _generate(config, trial)
    base = base_model(config, train.X)
    if config.experiment == "sinc":
        x = np.linspace(-10.0, 10.0, n_points)
        pts = x[:, None]
        series = {"target": sinc(x)}
    else:
        pts = pde_boundary(n_points)
        x = pts[:, 1]
        neumann = config.experiment != "pde-dirichlet"
        series = {"target": 3.0 * x**2 if neumann else x**3}
    for m in methods:
        model = fit_method(config, m, train, specs, base)
        if config.experiment in ("pde-neumann", "pde-neumann-integrated"):
            series[m] = gcnn.predict_constrained_derivative(model, pts, axis=1)
        else:
            series[m] = gcnn.predict_constrained(model, pts)
    return x, series


def write_trace_svg(config, path, methods=None):
    """Line plot of :func:`boundary_traces` as a deterministic SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x, series = boundary_traces(config, methods)
    with matplotlib.rc_context({"svg.hashsalt": "lifrbf", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for label, vals in series.items():
            ax.plot(x, vals, "k--" if label == "target" else "-", label=label)
        if config.experiment == "sinc":
            ax.set_xlabel("x")
            ax.set_ylabel("f(x)")
        else:
            ax.set_xlabel("x2 (x1 = 0)")
            ax.set_ylabel("df/dx2" if config.experiment != "pde-dirichlet" else "f")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def write_outputs(config, reports, out_dir, svg=True):
    """Write per-method CSVs, a summary CSV, the config echo and optional SVG."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for method, rep in reports.items():
        p = out / f"{config.experiment}_{method}.csv"
        write_report_csv(rep, p)
        paths.append(p)
    p = out / f"{config.experiment}_summary.csv"
    write_summary_csv(reports, p)
    paths.append(p)
    (out / f"{config.experiment}_config.txt").write_text(config_to_text(config), encoding="utf-8")
    if svg:
        p = out / f"{config.experiment}_trace.svg"
        write_trace_svg(config, p, tuple(reports))
        paths.append(p)
    return paths
