"""Command-line entry point: ``twistlab <experiment> [options]``.

Exit status is 0 when the experiment's checks pass, 2 when they fail and
1 on errors (bad configuration, I/O).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments
from .config import EXPERIMENTS, ConfigError, defaults_for, load_config, parse_config_text

log = logging.getLogger("twistlab")

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twistlab", description="Surface-group twist experiments.")
    sub = p.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        s = sub.add_parser(name, help=f"run the {name} experiment")
        s.add_argument("--config", help="flat key = value configuration file")
        s.add_argument("--seed", type=lambda x: int(x, 0), help="64-bit seed")
        s.add_argument("--workers", type=int, help="worker threads")
        s.add_argument("--out", help="output path (default: stdout)")
        s.add_argument("--format", choices=("csv", "json"), help="output format")
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args) -> "experiments.ExperimentConfig":
    cfg = defaults_for(args.experiment)
    if args.config:
        cfg = load_config(args.config, cfg)
        if cfg.experiment != args.experiment:
            raise ConfigError(f"config is for {cfg.experiment!r}, not {args.experiment!r}")
    if args.set:
        cfg = parse_config_text("\n".join(args.set), cfg)
    over = {k: getattr(args, k) for k in ("seed", "workers", "out", "format") if getattr(args, k) is not None}
    return cfg.replace(**over)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve_config(args)
        res = experiments.run_experiment(cfg)
        if cfg.out:
            side = experiments.write_result(res, cfg.out)
            log.info("wrote %s and %s", cfg.out, side)
        else:
            sys.stdout.write(experiments.render_result(res))
        status = "PASS" if res.passed else "FAIL"
        print(
            f"{status} {cfg.experiment} seed={cfg.seed} elapsed={res.elapsed:.1f}s "
            + json.dumps(experiments.io.to_jsonable(res.summary), sort_keys=True),
            file=sys.stderr,
        )
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_PASS if res.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
