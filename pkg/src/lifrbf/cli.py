"""
Command-line entry point.

    lifrbf bench sinc|pde-dirichlet|pde-neumann --config FILE [--method M] [--out DIR]
    lifrbf analyze coupling|weights --config FILE --out DIR
    lifrbf fit --config FILE --out DIR [--method M] [--trial T]
    lifrbf predict MODEL --input CSV --out DIR [--axis K]

Exit status: 0 on success, 1 on configuration/usage errors, 2 on numerical
failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, bench, gcnn
from .errors import ConfigError, InfeasibleError, InvalidInputError, UnsupportedOperationError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_overrides(p):
    p.add_argument("--method", help="run a single method instead of the configured list")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sigma", type=float, help="constant RBF width")
    p.add_argument("--gamma", type=float, help="LIF locality parameter")
    p.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key (repeatable)")


def build_parser():
    parser = _Parser(prog="lifrbf", description="Equality-constrained RBF regression benchmarks")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("bench", help="run a benchmark experiment")
    p.add_argument("experiment", choices=bench.EXPERIMENTS)
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--parallel-trials", type=int, dest="parallel_trials")
    p.add_argument("--no-svg", action="store_true", help="skip the boundary-trace plot")
    _add_overrides(p)

    p = sub.add_parser("analyze", help="coupling-form and weight-change diagnostics")
    p.add_argument("study", choices=("coupling", "weights"))
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--sigmas", help="comma-separated widths for the weight study")
    _add_overrides(p)

    p = sub.add_parser("fit", help="fit one trial of an experiment and save the model")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--trial", type=int, default=0)
    _add_overrides(p)

    p = sub.add_parser("predict", help="evaluate a saved model on CSV inputs")
    p.add_argument("model")
    p.add_argument("--input", required=True, help="CSV with one input point per row")
    p.add_argument("--out", default=".")
    p.add_argument("--axis", type=int, help="emit d f / d x_axis instead of f")
    return parser


def _overrides(args):
    ov = {}
    for key in ("method", "trials", "seed", "sigma", "gamma", "noise_sigma", "parallel_trials",
                "sigmas"):
        val = getattr(args, key, None)
        if val is not None:
            ov[key] = str(val)
    for item in args.set:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        ov[key.strip()] = val.strip()
    return ov


def _cmd_bench(args):
    config = bench.load_config(args.config, _overrides(args))
    compatible = {args.experiment}
    if args.experiment.startswith("pde-neumann"):
        compatible = {"pde-neumann", "pde-neumann-integrated"}
    if config.experiment not in compatible:
        raise ConfigError(f"config describes {config.experiment!r}, not {args.experiment!r}")
    reports = bench.run_all(config)
    for path in bench.write_outputs(config, reports, args.out, svg=not args.no_svg):
        print(path)
    for method, rep in reports.items():
        s = rep.summary()
        print(f"{method}: mse_cstr {s['mse_cstr_mean']:.4g} +- {s['mse_cstr_std']:.4g}, "
              f"mse_test {s['mse_test_mean']:.4g} +- {s['mse_test_std']:.4g}")


def _cmd_analyze(args):
    config = bench.load_config(args.config, _overrides(args))
    if args.study == "coupling":
        paths = analysis.write_coupling_outputs(config, args.out)
    else:
        paths = analysis.write_weight_outputs(config, args.out)
    for path in paths:
        print(path)


def _cmd_fit(args):
    config = bench.load_config(args.config, _overrides(args))
    method = config.methods[0]
    train, _, specs = bench._generate(config, args.trial)
    base = bench.base_model(config, train.X)
    model = bench.fit_method(config, method, train, specs, base)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{config.experiment}_{method}_model.txt"
    gcnn.save_model(model, path)
    print(path)


def _cmd_predict(args):
    model = gcnn.load_model(args.model)
    try:
        X = np.loadtxt(args.input, delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read inputs {args.input}: {exc}") from exc
    if args.axis is None:
        y = gcnn.predict_constrained(model, X)
    else:
        y = gcnn.predict_constrained_derivative(model, X, args.axis)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "predictions.csv"
    with open(path, "w", encoding="utf-8") as fh:
        for v in y:
            fh.write(repr(float(v)) + "\n")
    print(path)


COMMANDS = {"bench": _cmd_bench, "analyze": _cmd_analyze, "fit": _cmd_fit, "predict": _cmd_predict}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        COMMANDS[args.verb](args)
    except (ConfigError, InvalidInputError, UnsupportedOperationError, OSError) as exc:
        print(f"lifrbf: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"lifrbf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
