"""Command-line interface.

Exit codes: 0 success, 2 usage or configuration, 3 I/O, 4 data or numerics.
"""

import argparse
import json
import sys

from . import experiment
from .errors import (
    ConfigError,
    DegenerateFit,
    DomainError,
    LedgerFormatError,
    MubVerifyError,
    UnsupportedDimension,
)
from .mub import build_mub, build_strategy, min_copies_table, strategy_to_json

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_strategy(args):
    try:
        strategy = build_strategy(build_mub(args.d))
    except UnsupportedDimension:
        return _fail(EXIT_USAGE, f"unsupported dimension {args.d} (supported: 2, 3, 5, 7)")
    doc = strategy_to_json(strategy, min_copies_table(strategy.lambda2))
    print(json.dumps(doc, indent=2))
    return 0


def _config_from(args):
    overrides = {
        "seed": args.seed,
        "n_trials": args.trials,
        "n_copies": args.copies,
        "output_dir": args.out,
        "jobs": args.jobs,
    }
    if args.config:
        return experiment.load_config(args.config, overrides)
    return experiment.parse_settings({k: v for k, v in overrides.items() if v is not None})


def cmd_simulate(args):
    config = _config_from(args)
    report = experiment.simulate(config)
    print(
        f"{config.n_trials} trials x {config.n_copies} copies -> {config.output_dir} "
        f"(pass probability {report.pass_probability:.6f}, {report.duration_s:.2f} s)",
        file=sys.stderr,
    )
    return 0


def cmd_run(args):
    config = _config_from(args)
    report, _, summary = experiment.run_experiment(config)
    msg = f"done in {report.duration_s:.2f} s -> {config.output_dir}"
    if summary is not None:
        msg += f"; slope {summary.slope:.4f} +- {summary.slope_stderr:.4f}"
    print(msg, file=sys.stderr)
    return 0


def cmd_analyze(args):
    for name in ("epsilon", "delta"):
        value = getattr(args, name)
        if not 0.0 < value < 1.0:
            return _fail(EXIT_USAGE, f"--{name} must lie in (0, 1)")
    curves = experiment.analyze(args.input, args.epsilon, args.delta, d=args.d)
    print(f"analyzed {len(curves)} trials -> {args.input}/curves", file=sys.stderr)
    return 0


def cmd_fit(args):
    window = None
    if args.window:
        try:
            window = experiment.parse_window(args.window)
        except ValueError as exc:
            return _fail(EXIT_USAGE, str(exc))
    summary = experiment.fit(args.input, window, d=args.d)
    for warning in summary.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(json.dumps(summary.to_json(), indent=2))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mubverify",
        description="Optimal MUB verification of maximally entangled qudits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("strategy", help="print the MUB strategy and a min-copies table as JSON")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_strategy)

    for name, func, helptext in (
        ("simulate", cmd_simulate, "simulate trials and write per-trial ledgers"),
        ("run", cmd_run, "simulate, analyze and fit in one go"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--copies", type=int)
        p.add_argument("--out")
        p.add_argument("--jobs", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("analyze", help="delta(N) and epsilon(N) curves from ledgers")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--d", type=int, help="dimension, if the directory has no report.json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fit", help="scaling exponent of epsilon(N)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--window", help="nlow:nhigh")
    p.add_argument("--d", type=int, help="dimension, if the directory has no report.json")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_USAGE, f"invalid config: {exc}")
    except UnsupportedDimension as exc:
        return _fail(EXIT_USAGE, str(exc))
    except (LedgerFormatError, DegenerateFit, DomainError) as exc:
        return _fail(EXIT_DATA, str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    except MubVerifyError as exc:
        return _fail(EXIT_DATA, str(exc))


if __name__ == "__main__":
    sys.exit(main())
