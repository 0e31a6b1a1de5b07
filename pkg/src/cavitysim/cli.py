"""Command-line experiment runner.

    cavitysim run <config-file> [--seed N] [--workers N] [--output-dir DIR]
    cavitysim validate <config-file>
    cavitysim scenarios

Exit codes: 0 success, 1 configuration error, 2 runtime/tolerance failure.
The default output root is ./runs, overridable with $CAVITYSIM_OUTPUT_ROOT.
"""

import argparse
import sys
from dataclasses import replace

from . import __version__
from .config import SCENARIOS, ConfigError, parse_config
from .dynamics import IntegrationError
from .runner import ENV_OUTPUT_ROOT, SCENARIO_NOTES, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavitysim",
        description="Cavity QED entanglement scenarios: run, validate, list.",
    )
    parser.add_argument("--version", action="version", version=f"cavitysim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario from a config file")
    run_p.add_argument("config", help="path to the config file")
    run_p.add_argument("--seed", type=int, default=None, help="override the config seed")
    run_p.add_argument("--workers", type=int, default=None, help="override worker count")
    run_p.add_argument(
        "--output-dir", default=None,
        help=f"override the output directory (default: ${ENV_OUTPUT_ROOT}/<scenario>)",
    )

    val_p = sub.add_parser("validate", help="parse and validate a config file")
    val_p.add_argument("config", help="path to the config file")

    sub.add_parser("scenarios", help="list scenario presets")
    return parser


def _load_config(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        return parse_config(text)
    except ConfigError as exc:
        print(f"error: invalid config {path}:", file=sys.stderr)
        for item in exc.errors:
            print(f"  {item}", file=sys.stderr)
        return None


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "scenarios":
        for name in SCENARIOS:
            print(f"{name:20s} {SCENARIO_NOTES[name]}")
        return EXIT_OK

    cfg = _load_config(args.config)
    if cfg is None:
        return EXIT_CONFIG

    if args.command == "validate":
        print(f"OK: {cfg.scenario} (design {cfg.design})")
        return EXIT_OK

    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.workers is not None:
        if args.workers < 1:
            print("error: --workers must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        cfg = replace(cfg, workers=args.workers)

    try:
        report = run_scenario(cfg, output_dir=args.output_dir)
    except (IntegrationError, ValueError, ArithmeticError) as exc:
        print(f"error: run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    print(f"wrote {len(report.trajectory_files)} trajectories to {report.output_dir}")
    for key in sorted(report.summary):
        print(f"  {key} = {report.summary[key]:.6g}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
