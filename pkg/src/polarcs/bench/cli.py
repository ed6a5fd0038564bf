"""Command-line entry point: ``bench run``, ``bench paper-exp1``, ``bench paper-exp2``."""
from __future__ import annotations

import argparse
import logging
import sys

from ..errors import ConfigError
from .config import KEYS, PRESETS, ExperimentConfig, apply_overrides, key_name, load_config
from .runner import run_sweep, summarize, write_results

log = logging.getLogger("polarcs.bench")


def _add_common(p):
    p.add_argument("--out", default="bench_out", help="output directory (default: bench_out)")
    p.add_argument("--seed", help="base random seed")
    p.add_argument("--trials", help="trials per sweep point")
    p.add_argument("--algorithms", help="comma-separated subset of bomp,cbp,bisp,l1synth_music")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key, e.g. --set solver.max_iterations=5000")
    for name in KEYS:
        if name in ("seed", "trials", "algorithms"):
            continue
        flag = "--" + key_name(name).replace(".", "-").replace("_", "-")
        p.add_argument(flag, dest="opt_" + name, help=argparse.SUPPRESS)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description="Monte Carlo line-spectrum benchmarks.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a sweep from a key=value config file")
    run.add_argument("--config", required=True)
    _add_common(run)
    for name in PRESETS:
        _add_common(sub.add_parser(name, help=f"preset sweep {name}"))
    return parser


def _overrides(args):
    pairs = []
    for name in ("seed", "trials", "algorithms"):
        if getattr(args, name) is not None:
            pairs.append((name, getattr(args, name)))
    for name in KEYS:
        value = getattr(args, "opt_" + name, None)
        if value is not None:
            pairs.append((key_name(name), value))
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        pairs.append(tuple(item.split("=", 1)))
    return pairs


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        base = load_config(args.config) if args.command == "run" else PRESETS[args.command]
        cfg: ExperimentConfig = apply_overrides(base, _overrides(args)).validate()
    except ConfigError as exc:
        print(f"bench: config error: {exc}", file=sys.stderr)
        return 2
    records = run_sweep(cfg)
    paths = write_results(records, cfg, args.out)
    for row in summarize(records, cfg):
        log.info("kappa=%g snr=%g %-14s err=%.4g bins", row["kappa"], row["snr_db"],
                 row["algorithm"], row["mean_freq_error_bins"])
    print(f"wrote {len(records)} records to {paths['raw.csv'].parent}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
