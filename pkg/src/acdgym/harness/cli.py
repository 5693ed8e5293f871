"""``acdgym`` command line: train, evaluate, report, sweep."""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from pathlib import Path

from ..errors import AcdGymError
from .config import ExperimentConfig, presets
from .report import cmd_report
from .runner import cmd_evaluate, cmd_train

log = logging.getLogger("acdgym")


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _parse_set(items) -> dict:
    """``--set yt.node_count=2`` style overrides; values are parsed as JSON when possible."""
    out = {}
    for item in items or ():
        if "=" not in item:
            raise AcdGymError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _config_from_args(args, **extra) -> ExperimentConfig:
    changes = _parse_set(getattr(args, "set", None))
    if args.seed is not None:
        changes["base_seed"] = args.seed
    if getattr(args, "runs", None) is not None:
        changes["runs"] = args.runs
    if getattr(args, "workers", None) is not None:
        changes["workers"] = args.workers
    if getattr(args, "steps", None) is not None:
        changes["total_steps"] = args.steps
    changes.update(extra)
    return ExperimentConfig.load(args.config, args.preset, changes)


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON config file (keys as in defaults.json)")
    p.add_argument("--preset", help="named preset applied before --config")
    p.add_argument("--seed", type=int, help="base seed (run i uses seed + i)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config key, e.g. yt.node_count=2 (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acdgym", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train runs and write per-run artifacts")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, help="output directory (default: config output_dir)")
    p.add_argument("--runs", type=int)
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--steps", type=int, help="total training steps per run")

    p = sub.add_parser("evaluate", help="evaluate a checkpoint or a scripted policy")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, required=True)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--checkpoint", type=Path)
    src.add_argument("--policy", help="scripted policy name")
    p.add_argument("--episodes", type=int)

    p = sub.add_parser("report", help="summarise run directories into a CSV table")
    p.add_argument("paths", nargs="+", type=Path, help="run directories or their parents")
    p.add_argument("--out", type=Path, default=Path("summary.csv"))

    p = sub.add_parser("sweep", help="train the cartesian product of sizes x orders x rewards")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--runs", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--sizes", type=_csv_list, help="comma-separated YT node counts")
    p.add_argument("--orders", type=_csv_list, help="comma-separated agent orders")
    p.add_argument("--rewards", type=_csv_list, help="comma-separated reward kinds")

    sub.add_parser("presets", help="list the named presets")
    return parser


def _sweep(args) -> int:
    base = _config_from_args(args)
    sizes = [int(s) for s in args.sizes] if args.sizes else [None]
    orders = args.orders or [None]
    rewards = args.rewards or [base["reward"]]
    if base.environment == "CAGE":
        sizes, orders = [None], [None]
    cells = []
    for size, order, reward in itertools.product(sizes, orders, rewards):
        extra = {"reward": reward}
        if size is not None:
            extra["yt.node_count"] = size
        if order is not None:
            extra["yt.agent_order"] = order
        cells.append(_config_from_args(args, **extra))  # validate every cell up front
    for cfg in cells:
        label = "_".join(str(p) for p in cfg.group_key())
        log.info("sweep cell %s", label)
        cmd_train(cfg, args.out / label)
    rows = cmd_report([args.out], args.out / "summary.csv")
    print(f"wrote {len(rows) - 1} row(s) to {args.out / 'summary.csv'}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "train":
            cfg = _config_from_args(args)
            results = cmd_train(cfg, args.out)
            out = args.out or Path(cfg["output_dir"])
            print(f"wrote {len(results)} run(s) to {out}")
        elif args.command == "evaluate":
            cfg = _config_from_args(args)
            res = cmd_evaluate(cfg, args.out, checkpoint=args.checkpoint, policy=args.policy,
                               episodes=args.episodes)
            print(f"mean score_gt {res.distribution.mean:.6f} over "
                  f"{res.distribution.values.size} episodes -> {args.out}")
        elif args.command == "report":
            rows = cmd_report(args.paths, args.out)
            print(f"wrote {len(rows) - 1} row(s) to {args.out}")
        elif args.command == "sweep":
            return _sweep(args)
        elif args.command == "presets":
            for name, body in sorted(presets().items()):
                print(f"{name}: {json.dumps(body, sort_keys=True)}")
    except (AcdGymError, ValueError, FileNotFoundError, OSError) as exc:
        print(f"acdgym: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
