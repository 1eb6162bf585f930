"""Command-line front end.

Subcommands
-----------
``decompose``
    Assemble the radiation operator, report the singular-value spectrum
    and the truncation rank for the configured threshold.
``reference``
    Produce the reference excitations (fit or load) and their mask metric.
``synthesize``
    Run the full pipeline: reference, minimum-norm inversion, null-space
    swarm optimization, assembly, metrics, artifacts.
``evaluate``
    Compute metrics for an existing excitation CSV under a scenario.

Exit codes: 0 success; 2 configuration error; 3 input-data error;
4 numerical failure; 5 optimization finished without reaching a positive
cost target (artifacts are still written).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import ScenarioConfig, load_config
from .errors import ConfigError, InputDataError, NumericalError
from .pipeline import run_decompose, run_evaluate, run_reference, run_synthesize

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4
EXIT_TARGET_NOT_REACHED = 5


def build_parser() -> argparse.ArgumentParser:
    """The argument parser for the ``nullbeam`` command."""
    parser = argparse.ArgumentParser(
        prog="nullbeam",
        description="Phased-array synthesis via truncated-SVD inversion "
        "and null-space excitation optimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "decompose": "operator spectrum and truncation rank",
        "reference": "reference excitations (fit or load)",
        "synthesize": "full synthesis pipeline",
        "evaluate": "metrics for an existing excitation file",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--seed", type=int, help="override reference and swarm seeds")
        p.add_argument("--output", help="override the output directory")
        p.add_argument(
            "--phi-cuts",
            help="comma-separated azimuth cut angles in degrees (planar scenarios)",
        )
        if name == "evaluate":
            p.add_argument("excitations", help="excitation CSV to evaluate")
    return parser


def _apply_overrides(cfg: ScenarioConfig, args: argparse.Namespace) -> ScenarioConfig:
    replacements = {}
    if args.output is not None:
        replacements["output"] = dataclasses.replace(cfg.output, directory=args.output)
    if args.phi_cuts is not None:
        try:
            cuts = tuple(float(v) for v in args.phi_cuts.split(",") if v.strip())
        except ValueError as exc:
            raise ConfigError(f"bad --phi-cuts value: {exc}") from exc
        out = replacements.get("output", cfg.output)
        replacements["output"] = dataclasses.replace(out, phi_cuts_deg=cuts)
    if args.seed is not None:
        if cfg.reference is not None:
            replacements["reference"] = dataclasses.replace(
                cfg.reference, seed=args.seed
            )
        if cfg.pso is not None:
            replacements["pso"] = dataclasses.replace(cfg.pso, seed=args.seed)
    return dataclasses.replace(cfg, **replacements) if replacements else cfg


def _fmt(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _print_report(report: dict, indent: str = "") -> None:
    for key, value in report.items():
        if isinstance(value, dict):
            print(f"{indent}{key}:")
            _print_report(value, indent + "  ")
        else:
            print(f"{indent}{key} = {_fmt(value)}")


def main(argv=None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "decompose":
            report = run_decompose(cfg)
        elif args.command == "reference":
            report = run_reference(cfg)
        elif args.command == "synthesize":
            report = run_synthesize(cfg)
        else:
            report = run_evaluate(cfg, args.excitations)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputDataError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ZeroDivisionError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _print_report(report)
    if not report.get("target_reached", True):
        print("optimization did not reach the configured cost target", file=sys.stderr)
        return EXIT_TARGET_NOT_REACHED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
