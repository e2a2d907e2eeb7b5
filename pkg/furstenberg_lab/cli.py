"""
Rich CLI interface for Furstenberg Lab.
"""

import argparse
import logging
import sys
from typing import Any, Dict, List

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.text import Text

from . import __version__
from .config import LabConfig
from .constructions import (
    build_delta,
    build_furstenberg,
    build_prime_furstenberg,
    build_psquare,
    exponent_summary,
    lemma_multipliers,
    verify_delta,
    verify_instance,
    verify_ratio_sumsets,
)
from .exceptions import (
    ConfigurationError,
    FurstenbergLabException,
    InvalidParameterError,
    ParameterError,
    ValidationError,
)
from .ff_core import Field
from .incidence_lab import furstenberg_check, naive_direction_maxima, pair_count_certificate, run_pipeline
from .logger import setup_logging
from .lw_refine import lw_bound, lw_holds, random_grid, refine
from .numerics import parse_rational, parse_scale
from .reporting import Reporter
from .serialization import (
    delta_to_dict,
    grid_from_dict,
    grid_to_dict,
    instance_from_dict,
    instance_to_dict,
    load_artifact,
)
from .validators import ParameterValidator

console = Console(stderr=True)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class CLI:
    """Command-line interface for Furstenberg Lab."""

    def __init__(self):
        """Initialize CLI."""
        self.parser = self._create_parser()
        self.reporter = Reporter(console)

    def _create_parser(self) -> argparse.ArgumentParser:
        """Create argument parser."""

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("-c", "--config", help="Path to configuration file (YAML or JSON)")
        common.add_argument("-o", "--out", help="Write the artifact here instead of standard output")
        common.add_argument("-j", "--jobs", type=int, help="Worker processes (default: 1)")
        common.add_argument("--log-level", help="Console log level (default: WARNING)")
        common.add_argument("--log-file", help="Also log to this file")
        common.add_argument("--json-logs", action="store_true", default=None, help="JSON lines in the log file")
        common.add_argument("-q", "--quiet", action="store_true", help="No summary tables")

        parser = argparse.ArgumentParser(
            prog="furstenberg-lab",
            description="Furstenberg Lab - exact experiments with Furstenberg sets over finite fields",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  # Build the multiplier construction in F_13^2
  furstenberg-lab construct prime --p 13 --n 2 --beta 1/2 --K 1 --out inst.json

  # Check every direction against a threshold
  furstenberg-lab verify --in inst.json --threshold 4

  # Refine a seeded random grid along its first two coordinates
  furstenberg-lab refine --random 3:6:100 --seed 7 --m 2

  # Run the incidence pipeline in F_7^3
  furstenberg-lab lab --p 7 --n 3 --csv histogram.csv

  # Generate example configuration
  furstenberg-lab --generate-config example_config.yaml
            """,
        )
        parser.add_argument("--version", action="version", version=f"Furstenberg Lab v{__version__}")
        parser.add_argument(
            "--generate-config",
            metavar="FILENAME",
            help="Generate example configuration file and exit",
        )

        verbs = parser.add_subparsers(dest="verb")

        construct = verbs.add_parser("construct", parents=[common], help="Build a Furstenberg instance")
        construct.add_argument("kind", choices=["prime", "psquare", "power"], help="Construction family")
        construct.add_argument("--p", type=int, help="Prime characteristic (prime, psquare)")
        construct.add_argument("--q", type=int, help="Field order (power; beta is 0)")
        construct.add_argument("--n", type=int, required=True, help="Dimension")
        construct.add_argument("--beta", default="1/2", help="Exact exponent num/den (default: 1/2)")
        construct.add_argument("--K", default="1", help="Scale constant, decimal or num/den (default: 1)")

        delta = verbs.add_parser("delta", parents=[common], help="Build and check a Delta-system")
        delta.add_argument("--q", type=int, required=True, help="Field order")
        delta.add_argument("--K", default="1", help="Scale constant, decimal or num/den (default: 1)")
        delta.add_argument("--ratio-t", type=int, help="Also check ratio sumsets up to t (prime fields)")

        verify = verbs.add_parser("verify", parents=[common], help="Check coverage and pair counting")
        verify.add_argument("--in", dest="input", required=True, help="Instance artifact")
        verify.add_argument("--threshold", type=int, help="Points required per direction (default: instance)")
        verify.add_argument("--oracle", action="store_true", help="Cross-check against the all-lines oracle")

        refine_cmd = verbs.add_parser("refine", parents=[common], help="Loomis-Whitney refinement of a grid")
        source = refine_cmd.add_mutually_exclusive_group(required=True)
        source.add_argument("--in", dest="input", help="Grid artifact")
        source.add_argument("--random", metavar="N:B:SIZE", help="Seeded random grid in [0, B)^N")
        refine_cmd.add_argument("--seed", type=int, help="Seed for --random")
        refine_cmd.add_argument("--m", type=int, required=True, help="Number of leading coordinates")
        refine_cmd.add_argument("--constant", help="Removal constant (default: 100n)")

        lab = verbs.add_parser("lab", parents=[common], help="Run the incidence pipeline")
        lab.add_argument("--p", type=int, required=True, help="Prime characteristic")
        lab.add_argument("--n", type=int, required=True, help="Dimension >= 3")
        lab.add_argument("--K", default="1", help="Scale constant of the input instance (default: 1)")
        lab.add_argument("--in", dest="input", help="Use this instance instead of building one")
        lab.add_argument("--delta-coeff", type=float, help="Coefficient of delta (default: 0.1)")
        lab.add_argument("--csv", help="Write the planar richness histogram here")

        return parser

    def run(self, args: List[str] = None) -> int:
        """Run the CLI and return the exit code."""

        try:
            parsed_args = self.parser.parse_args(args)
        except SystemExit as e:
            return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

        # Handle config generation
        if parsed_args.generate_config:
            return self._generate_config(parsed_args.generate_config)

        if not parsed_args.verb:
            self.parser.print_usage(sys.stderr)
            return EXIT_USAGE

        try:
            config = self._load_config(parsed_args)
            setup_logging(
                console_level=getattr(logging, config.log_level),
                log_file=config.log_file,
                use_json=config.json_logs,
            )
            handler = getattr(self, f"_cmd_{parsed_args.verb}")
            return handler(parsed_args, config)
        except (ParameterError, ConfigurationError, ValidationError, FileNotFoundError, ValueError) as e:
            console.print(f"[red]Error: {e}[/red]")
            return EXIT_USAGE
        except FurstenbergLabException as e:
            console.print(f"[red]Error: {e}[/red]")
            return EXIT_CHECK_FAILED

    def _load_config(self, parsed_args: argparse.Namespace) -> LabConfig:
        """Config file values, overridden by explicitly given flags."""
        config = LabConfig.from_file(parsed_args.config) if parsed_args.config else LabConfig()
        overrides: Dict[str, Any] = {
            "jobs": parsed_args.jobs,
            "log_level": parsed_args.log_level,
            "log_file": parsed_args.log_file,
            "json_logs": parsed_args.json_logs,
            "delta_coefficient": getattr(parsed_args, "delta_coeff", None),
        }
        data = {**config.__dict__, **{k: v for k, v in overrides.items() if v is not None}}
        return LabConfig.from_dict(data)

    # -- verbs --------------------------------------------------------------

    def _cmd_construct(self, args: argparse.Namespace, config: LabConfig) -> int:
        K = parse_scale(args.K)
        if args.kind == "power":
            if args.q is None:
                raise InvalidParameterError("construct power needs --q", parameter="q")
            ParameterValidator.validate_order(args.q, config.max_order)
            inst = build_furstenberg(Field.from_order(args.q), args.n, 0, K, jobs=config.jobs)
        else:
            if args.p is None:
                raise InvalidParameterError(f"construct {args.kind} needs --p", parameter="p")
            if args.kind == "prime":
                ParameterValidator.validate_order(args.p, config.max_order)
                inst = build_prime_furstenberg(args.p, args.n, args.beta, K, jobs=config.jobs)
            else:
                ParameterValidator.validate_order(args.p * args.p, config.max_order)
                inst = build_psquare(args.p, args.n, jobs=config.jobs)

        report = verify_instance(inst)
        self.reporter.export_json(instance_to_dict(inst), args.out)
        if not args.quiet:
            self._print_header(f"construct {args.kind}", f"{inst.field} in dimension {inst.n}")
            self.reporter.print_summary(
                "Instance",
                [
                    ("|S|", inst.size),
                    ("size bound", inst.size_bound),
                    ("threshold", inst.threshold),
                    ("min witness count", inst.min_witness_count),
                    ("witnesses consistent", report.passed),
                ],
            )
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    def _cmd_delta(self, args: argparse.Namespace, config: LabConfig) -> int:
        ParameterValidator.validate_order(args.q, config.max_order)
        K = parse_scale(args.K)
        f = Field.from_order(args.q)
        d = build_delta(f, K)
        report = verify_delta(d)
        multipliers = lemma_multipliers(d, K)
        artifact = {
            "kind": "delta_report",
            "delta": delta_to_dict(d),
            "report": report.to_dict(),
            "multipliers": multipliers.to_dict(),
        }
        passed = report.passed and multipliers.passed
        if args.ratio_t is not None:
            ratio = verify_ratio_sumsets(d, args.ratio_t)
            artifact["ratio_sumsets"] = ratio.to_dict()
            passed = passed and ratio.passed
        artifact["passed"] = passed

        self.reporter.export_json(artifact, args.out)
        if not args.quiet:
            self._print_header("delta", str(f))
            self.reporter.print_summary(
                "Delta-system",
                [
                    ("|Delta|", len(d.delta)),
                    ("mu", f.format_element(d.mu)),
                    ("recipe", d.recipe),
                    ("covers F_q", report.covered),
                    ("good multipliers", f"{len(multipliers.good)}/{multipliers.required}"),
                ],
            )
        return EXIT_OK if passed else EXIT_CHECK_FAILED

    def _cmd_verify(self, args: argparse.Namespace, config: LabConfig) -> int:
        inst = instance_from_dict(load_artifact(args.input))
        threshold = inst.threshold if args.threshold is None else args.threshold
        coverage = furstenberg_check(inst, threshold, jobs=config.jobs)
        pairs = pair_count_certificate(inst)
        artifact = {
            "kind": "verify_report",
            "coverage": coverage.to_dict(),
            "pair_count": pairs.to_dict(),
            "exponents": exponent_summary(inst.field.q, inst.n, inst.beta, inst.size),
        }
        passed = coverage.covered and pairs.passed
        if args.oracle:
            oracle = naive_direction_maxima(inst.field, inst.points, inst.n)
            agrees = oracle == coverage.maxima
            artifact["oracle_agrees"] = agrees
            passed = passed and agrees
        artifact["passed"] = passed

        self.reporter.export_json(artifact, args.out)
        if not args.quiet:
            self._print_header("verify", args.input)
            self.reporter.print_summary(
                "Coverage",
                [
                    ("threshold", threshold),
                    ("min direction maximum", coverage.min_maximum),
                    ("|S|(|S|-1)", pairs.lhs),
                    ("D t(t-1)", pairs.rhs),
                ],
            )
            checks = [("covered", coverage.covered), ("pair count", pairs.passed)]
            if args.oracle:
                checks.append(("oracle agrees", artifact["oracle_agrees"]))
            self.reporter.print_checks(checks)
        return EXIT_OK if passed else EXIT_CHECK_FAILED

    def _cmd_refine(self, args: argparse.Namespace, config: LabConfig) -> int:
        if args.random is not None:
            if args.seed is None:
                raise InvalidParameterError("--random needs an explicit --seed", parameter="seed")
            T = random_grid(*_parse_random_spec(args.random), seed=args.seed)
        else:
            T = grid_from_dict(load_artifact(args.input))
        c = parse_rational(args.constant) if args.constant is not None else None
        refined, certificate = refine(T, args.m, c)
        artifact = {
            "kind": "refine_report",
            "input": grid_to_dict(T),
            "lw_bound": lw_bound(T) if T.n >= 2 else None,
            "lw_holds": lw_holds(T) if T.n >= 2 else None,
            "refined": grid_to_dict(refined),
            "certificate": certificate.to_dict(),
        }
        self.reporter.export_json(artifact, args.out)
        if not args.quiet:
            self._print_header("refine", f"|T| = {len(T)}, n = {T.n}, m = {args.m}")
            self.reporter.print_summary(
                "Refinement",
                [("|T|", certificate.t0), ("|T1|", certificate.t1), ("|T2|", certificate.t2), ("N", certificate.N)],
            )
            self.reporter.print_checks(
                [("bounds", all(certificate.bounds_ok)), ("mass", certificate.mass_ok), ("fiber LW", certificate.fiber_lw_ok)]
            )
        return EXIT_OK if certificate.passed else EXIT_CHECK_FAILED

    def _cmd_lab(self, args: argparse.Namespace, config: LabConfig) -> int:
        ParameterValidator.validate_dimension(args.n, minimum=3)
        cfg = config.pipeline_config(args.p, args.n)
        if args.input:
            inst = instance_from_dict(load_artifact(args.input))
        else:
            ParameterValidator.validate_order(args.p, config.max_order)
            inst = build_prime_furstenberg(args.p, args.n, "1/2", parse_scale(args.K), jobs=config.jobs)
        report = run_pipeline(cfg, inst, jobs=config.jobs)
        artifact = {"kind": "pipeline_report", **report.to_dict()}
        self.reporter.export_json(artifact, args.out)
        if args.csv:
            self.reporter.export_csv(report.histogram, args.csv)
        if not args.quiet:
            self._print_header("lab", f"F_{args.p}^{args.n}")
            self.reporter.print_summary(
                "Pipeline",
                [
                    ("M", report.M),
                    *((f"|{k}|", v) for k, v in report.sizes.items()),
                    ("stage", report.stage),
                    ("r", report.r),
                    ("projection pair", report.projection_pair),
                    ("planar points", report.planar.get("points")),
                ],
            )
            self.reporter.print_checks([(c.name, c.passed) for c in report.checks])
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    # -- helpers ------------------------------------------------------------

    def _print_header(self, verb: str, subject: str):
        """Print header information."""
        header = Text()
        header.append("Furstenberg Lab\n", style="bold cyan")
        header.append(f"\n{verb}: {subject}\n")
        console.print(Panel(header, box=box.ROUNDED))

    def _generate_config(self, filename: str) -> int:
        """Generate example configuration file."""
        try:
            LabConfig().to_file(filename)
        except ValueError as e:
            console.print(f"[red]Error: {e}[/red]")
            return EXIT_USAGE
        console.print(f"[green]✓[/green] Example configuration saved to: {filename}")
        return EXIT_OK


def _parse_random_spec(spec: str):
    """Parse "n:b:size" into three integers."""
    parts = spec.split(":")
    try:
        n, b, size = (int(x) for x in parts)
    except ValueError:
        raise InvalidParameterError(f"--random expects N:B:SIZE, got {spec!r}", parameter="random", value=spec)
    return n, b, size


def main():
    """Main entry point."""
    cli = CLI()
    sys.exit(cli.run())


if __name__ == "__main__":
    main()
