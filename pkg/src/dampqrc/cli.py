"""Command line entry point: ``dampqrc run|sweep|taskgen``.

Exit status is 0 on success, 1 when an experiment fails at run time and 2
for an invalid config or invalid parameters.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from pathlib import Path

from . import harness

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2


def _global_options(defaults: bool) -> argparse.ArgumentParser:
    # attached to the main parser and every subcommand so the flags work in
    # either position; subparsers use SUPPRESS so they do not clobber values
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--workers", type=int, default=d(os.cpu_count() or 1), help="worker processes (default: logical CPUs)")
    p.add_argument("--seed", type=int, default=d(None), help="override the config seed")
    p.add_argument("--out-dir", default=d(None), help=f"output directory (default: ${harness.OUT_DIR_ENV} or ./results)")
    return p


def _kv(text: str):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dampqrc", description=__doc__.splitlines()[0], parents=[_global_options(True)])
    sub = parser.add_subparsers(dest="command", required=True)
    glob = _global_options(False)

    run = sub.add_parser("run", parents=[glob], help="run one experiment config")
    run.add_argument("config", type=Path)

    sweep = sub.add_parser("sweep", parents=[glob], help="run a config with a sweep section")
    sweep.add_argument("config", type=Path)

    gen = sub.add_parser("taskgen", parents=[glob], help="write a benchmark input/target series as CSV")
    gen.add_argument("task", choices=["narma", "mackey-glass", "delay"])
    gen.add_argument("params", nargs="*", type=_kv, metavar="key=value", help="e.g. p=9 T=200 length=200 or tau=5")
    gen.add_argument("-o", "--output", required=True, type=Path)
    return parser


def _load(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config)
    if args.seed is not None:
        cfg = harness.parse_config({**cfg.to_dict(), "seed": args.seed})
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "taskgen":
            text = harness.taskgen(args.task, dict(args.params), seed=args.seed or 0)
            args.output.parent.mkdir(parents=True, exist_ok=True)
            args.output.write_text(text)
            print(args.output)
            return EXIT_OK
        cfg = _load(args)
        if args.command == "sweep" and cfg.sweep is None:
            raise harness.ConfigError("config has no sweep section", field="sweep")
        if args.command == "run" and cfg.sweep is not None:
            raise harness.ConfigError("config has a sweep section; use the sweep command", field="sweep")
        writer = harness.write_run if args.command == "run" else harness.write_sweep
        print(writer(cfg, args.out_dir, args.workers))
        return EXIT_OK
    except harness.ConfigError as exc:
        where = f"{args.config}: " if getattr(args, "config", None) else ""
        print(f"config error: {where}{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TypeError, ValueError) as exc:
        if args.command == "taskgen":
            print(f"invalid parameters: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        traceback.print_exc()
        return EXIT_RUNTIME
    except OSError as exc:
        if isinstance(exc, FileNotFoundError) and getattr(args, "config", None) == Path(exc.filename or ""):
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        traceback.print_exc()
        return EXIT_RUNTIME
    except Exception:
        traceback.print_exc()
        return EXIT_RUNTIME
