"""Command-line entry point: run scenario configs and print or save CSV.

Exit codes: 0 on success, 2 for config problems, 3 when an exact
enumeration refuses to run because it would exceed the configured cap.
"""

from __future__ import annotations

import argparse
import sys

from .prob import CELL_CAP_ENV, ConfigError, DelnetError, EnumerationLimitError
from .scenarios import RUN_KINDS, load_config, run_config


def _add_common(parser):
    parser.add_argument("config", help="path to a scenario config")
    parser.add_argument("--out", help="write CSV here instead of the config's "
                                      "own 'out' (default: stdout)")
    parser.add_argument("--seed", type=int,
                        help="override the config's rng seed")
    parser.add_argument("--bits", action="store_true",
                        help="report log-based columns in bits instead of nats")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delnet",
        description="Exact delegated-decision experiments from TOML configs. "
                    f"Set {CELL_CAP_ENV} to raise the joint-enumeration cap.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run any scenario config "
                                     f"({', '.join(RUN_KINDS)})")
    _add_common(run)
    for name, text in (
            ("encode-opt", "budget-constrained optimal encoders per k"),
            ("tax", "communication tax of one channel under a proper rule"),
            ("chain", "per-stage decomposition of a relay chain's log tax"),
            ("review", "selective-review frontier over a cost grid"),
            ("blackwell", "dominance check: garbling witness or separating loss")):
        _add_common(sub.add_parser(name, help=text))
    return parser


_COMMAND_KINDS = {
    "encode-opt": ("encode-opt",),
    "tax": ("tax",),
    "chain": ("chain",),
    "review": ("review-frontier",),
    "blackwell": ("blackwell",),
    "run": RUN_KINDS,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        allowed = _COMMAND_KINDS[args.command]
        if cfg.kind not in allowed:
            raise ConfigError(
                f"'delnet {args.command}' expects a config of kind "
                f"{' or '.join(allowed)}, got '{cfg.kind}'")
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be >= 0")
            cfg = cfg.with_seed(args.seed)
        table = run_config(cfg)
    except ConfigError as err:
        print(f"delnet: config error: {err}", file=sys.stderr)
        return 2
    except EnumerationLimitError as err:
        print(f"delnet: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"delnet: {err}", file=sys.stderr)
        return 2
    except DelnetError as err:
        print(f"delnet: {err}", file=sys.stderr)
        return 1
    text = table.render(bits=args.bits)
    out = args.out if args.out is not None else cfg.out
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
