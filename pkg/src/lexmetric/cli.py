"""lexmetric <command> [options]

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .commands import COMMANDS, UsageError, resolve_set, run_command
from .config import LOG_BASES, bundled_config, load_config, number
from .divergence import VARIANTS
from .errors import LexError
from .reports import render_human, render_json


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lexmetric", description="Distances and agreements between regulations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="PATH", help="analysis config (default: bundled communal example)")
    p.add_argument("--format", choices=("human", "json", "dot"), default="human")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--log-base", choices=LOG_BASES)
    p.add_argument("--from", dest="source", metavar="SET")
    p.add_argument("--to", dest="target", metavar="SET")
    p.add_argument("--k", type=int, metavar="N")
    p.add_argument("--incremental", action="store_true")
    p.add_argument("--r", metavar="VALUE")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config) if args.config else bundled_config()
        if args.k is not None and args.k < 0:
            raise UsageError("--k must be nonnegative")
        r = None
        if args.r is not None:
            try:
                r = number(args.r)
            except LexError:
                raise UsageError(f"--r expects a nonnegative number, got {args.r!r}") from None
        report = run_command(
            cfg,
            args.command,
            variant=args.variant,
            log_base=args.log_base,
            source=resolve_set(cfg, args.source) if args.source is not None else None,
            target=resolve_set(cfg, args.target) if args.target is not None else None,
            k=args.k,
            incremental=args.incremental,
            r=r,
            fmt=args.format,
        )
    except UsageError as exc:
        print(f"lexmetric: usage error: {exc}", file=sys.stderr)
        return 2
    except LexError as exc:
        print(f"lexmetric: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    out = render_json(report) if args.format == "json" else render_human(report)
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
