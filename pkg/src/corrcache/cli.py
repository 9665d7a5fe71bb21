"""Command-line entry point: ``python -m corrcache <command>``."""
from __future__ import annotations

import argparse
import logging
import sys

from .compressor import manifest, partition_library, uncompressed
from .config import ConfigError, ExperimentConfig, dump_config, load_config, parse_sweep
from .harness import (
    RateMemoryTable,
    TrialFailure,
    bounds_table,
    emit_csv,
    format_csv,
    read_csv,
    run_experiment,
)
from .library import build_grouped_library
from .plot import plot_svg
from .worked import demo_text

__all__ = ["build_parser", "cli", "main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrcache",
                                     description="Correlation-aware cache-aided coded multicast experiments.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, out_help):
        p.add_argument("--config", metavar="PATH", help="key=value experiment configuration")
        p.add_argument("--out", metavar="PATH", help=out_help)
        p.add_argument("--seed", type=int, metavar="N", help="master seed (overrides config)")
        p.add_argument("--trials", type=int, metavar="N", help="trials per memory point (overrides config)")
        p.add_argument("--sweep", metavar="START:STEP:STOP", help="memory sizes (overrides config)")
        p.add_argument("-v", "--verbose", action="store_true")

    common(sub.add_parser("gen", help="write a configuration with the compressed library manifest"),
           "config file to write (default stdout)")
    common(sub.add_parser("simulate", help="Monte-Carlo sweep to CSV"), "CSV file (default stdout)")
    common(sub.add_parser("bounds", help="analytic bounds only, to CSV"), "CSV file (default stdout)")
    p = sub.add_parser("plot", help="render a CSV as an SVG chart")
    p.add_argument("csv", metavar="CSV")
    p.add_argument("--out", metavar="PATH", required=True, help="SVG file to write")
    p.add_argument("--title", default="Expected rate vs. cache size")
    p.add_argument("-v", "--verbose", action="store_true")
    p = sub.add_parser("demo", help="four-file walkthrough with explicit caches and codeword")
    p.add_argument("--seed", type=int, default=7, metavar="N", help="seed for the file contents")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.trials is not None:
        over["trials"] = args.trials
    if args.sweep is not None:
        over["sweep"] = parse_sweep(args.sweep)
    return cfg.replace(**over).validate() if over else cfg.validate()


def _write_csv(table: RateMemoryTable, out) -> None:
    if out:
        emit_csv(table, out)
    else:
        sys.stdout.write(format_csv(table))


def _gen(args) -> None:
    cfg = _config(args)
    lib = build_grouped_library(cfg.m, cfg.kappa, cfg.delta, cfg.file_units)
    clib = partition_library(lib, cfg.n, cfg.delta) if cfg.kappa > 1 else uncompressed(lib)
    text = dump_config(cfg)
    text += f"# compressed library: {len(clib.i_files)} I-files, {len(clib.p_files)} P-files, " \
            f"{clib.total_units} of {lib.m * lib.file_units} units\n"
    text += "# id role reference units\n"
    text += "".join(f"# {line}\n" for line in manifest(clib).splitlines())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _simulate(args) -> None:
    _write_csv(run_experiment(_config(args)), args.out)


def _bounds(args) -> None:
    cfg = _config(args)
    if not cfg.bounds:
        raise ConfigError(["bounds: none enabled"])
    _write_csv(RateMemoryTable(bounds_table(cfg), cfg.m), args.out)


def _plot(args) -> None:
    table = read_csv(args.csv)
    if table.rows:
        table.m = int(max(r.M for r in table.rows)) or None
    plot_svg(table, args.out, args.title)


def _demo(args) -> None:
    sys.stdout.write(demo_text(seed=args.seed))


COMMANDS = {"gen": _gen, "simulate": _simulate, "bounds": _bounds, "plot": _plot, "demo": _demo}


def cli(argv=None) -> int:
    """Run one command; returns the process exit status."""
    args = build_parser().parse_args(argv)  # exits 2 on usage errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ConfigError, TrialFailure, OSError, ValueError, KeyError) as exc:
        print(f"corrcache {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli())
