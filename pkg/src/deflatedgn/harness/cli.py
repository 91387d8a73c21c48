"""Command-line interface.

Subcommands: run, compare, beta-field, list-problems, list-methods.  Configs
are flat JSON files; ``--set key=value`` overrides individual keys (values
parsed as JSON, falling back to strings), and a few common flags override
directly.  The default output root comes from $DEFLATEDGN_OUTPUT_ROOT.
"""

import argparse
import json
import sys

from ..exceptions import ConfigError, DeflatedGNError
from .config import ExperimentConfig
from .runner import compare_methods, emit_beta_field, list_methods, list_problems, run_experiment


def _parse_set(pairs) -> dict:
    overrides = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, text = pair.split("=", 1)
        try:
            overrides[key] = json.loads(text)
        except json.JSONDecodeError:
            overrides[key] = text
    return overrides


def _load_config(path, args) -> ExperimentConfig:
    config = ExperimentConfig.from_file(path)
    overrides = _parse_set(getattr(args, "set", None))
    if getattr(args, "output_dir", None):
        overrides["output_dir"] = args.output_dir
    if getattr(args, "no_plots", False):
        overrides["plots"] = False
    return config.with_overrides(overrides) if overrides else config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deflatedgn",
        description="Find many local minima of nonlinear least squares problems by deflation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a JSON config")
    run_p.add_argument("config")
    run_p.add_argument("--set", action="append", metavar="KEY=VALUE")
    run_p.add_argument("--output-dir")
    run_p.add_argument("--no-plots", action="store_true")

    cmp_p = sub.add_parser("compare", help="run several configs on one problem and tabulate costs")
    cmp_p.add_argument("configs", nargs="+")
    cmp_p.add_argument("--output-dir")
    cmp_p.add_argument("--no-plots", action="store_true")

    beta_p = sub.add_parser("beta-field", help="emit the classified beta field of a 2-d problem")
    beta_p.add_argument("config")
    beta_p.add_argument("--set", action="append", metavar="KEY=VALUE")
    beta_p.add_argument("--output-dir")
    beta_p.add_argument("--no-plots", action="store_true")

    sub.add_parser("list-problems", help="print the registered problem names")
    sub.add_parser("list-methods", help="print the registered method names")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            report = run_experiment(_load_config(args.config, args))
            print(f"wrote {report.output_dir}")
            print(
                f"{report.config.method} on {report.config.problem}: "
                f"{report.n_solutions} solution(s), "
                f"{report.total_residual_evals} residual evals, "
                f"{report.wall_time_s:.2f}s"
            )
            if not report.discoveries and report.rounds and not any(
                r.converged for r in report.rounds
            ):
                print("warning: no round converged", file=sys.stderr)
                return 1
            return 0
        if args.command == "compare":
            configs = [_load_config(path, args) for path in args.configs]
            if args.no_plots:
                configs = [c.with_overrides({"plots": False}) for c in configs]
            out = compare_methods(configs, output_dir=args.output_dir)
            print(f"wrote {out}")
            return 0
        if args.command == "beta-field":
            out = emit_beta_field(_load_config(args.config, args), output_dir=args.output_dir)
            print(f"wrote {out}")
            return 0
        if args.command == "list-problems":
            print("\n".join(list_problems()))
            return 0
        if args.command == "list-methods":
            print("\n".join(list_methods()))
            return 0
        parser.error(f"unknown command {args.command!r}")
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DeflatedGNError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
