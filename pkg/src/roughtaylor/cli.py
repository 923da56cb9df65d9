"""Command-line surface: one subcommand per experiment kind.

Every subcommand takes ``--config <file>`` (JSON, or TOML normalized to the
same schema) and ``--out <dir>``; reruns with identical configs produce
byte-identical outputs.  Exit status is 0 iff the run had zero bound
violations and no solver errors.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import KINDS, OUTPUT_DIR_ENV, load_config, run, validate

__all__ = ["main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roughtaylor",
        description="Reproducible experiments for rough-path Taylor expansions.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        cmd = sub.add_parser(kind, help=f"run a {kind} experiment")
        cmd.add_argument("--config", required=True, help="JSON or TOML config file")
        cmd.add_argument(
            "--out",
            default=None,
            help=f"output directory (default: config, then ${OUTPUT_DIR_ENV}, then .)",
        )
        cmd.add_argument(
            "--seed-override",
            default=None,
            help="comma-separated seed list replacing the config's seeds",
        )
        cmd.add_argument("--quiet", action="store_true", help="suppress summary output")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(args.config, output_dir=args.out)
    if config.kind and config.kind != args.kind:
        print(
            f"error: config kind {config.kind!r} does not match subcommand {args.kind!r}",
            file=sys.stderr,
        )
        return 2
    config.kind = args.kind
    if args.seed_override is not None:
        config.parameters["seeds"] = [int(s) for s in args.seed_override.split(",")]
    problems = validate(config)
    if problems:
        for problem in problems:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    report = run(config)
    if not args.quiet:
        status = "ok" if report.ok else "FAILED"
        print(
            f"{args.kind}: {status} "
            f"({len(report.records)} records, {report.violations} violations, "
            f"{len(report.errors)} errors) -> {config.output_dir}/report.json"
        )
        for err in report.errors:
            print(f"  error: {err}", file=sys.stderr)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
