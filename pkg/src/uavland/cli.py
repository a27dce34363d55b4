"""Command-line entry point: ``uavland {train,eval,plot,serve}``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from uavland import bridge, harness


def _train(args):
    config = harness.RunConfig.load(args.config)
    overrides = {"seed": args.seed, "algorithm": args.algo, "output_dir": args.out}
    config = dataclasses.replace(config, **{k: v for k, v in overrides.items() if v is not None})
    summary = harness.train(config)
    print(json.dumps(summary, indent=2, sort_keys=True))


def _eval(args):
    result = harness.evaluate(args.checkpoint, args.episodes, args.seed, algorithm=args.algo)
    print(json.dumps(result, indent=2, sort_keys=True))


def _plot(args):
    harness.plot(args.metrics, args.out)
    print(args.out)


def _serve(args):
    bridge.serve(address=(args.host, args.port))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavland", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train an agent from a JSON run config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--algo", choices=["ddpg", "td3", "sac"])
    p.add_argument("--out")
    p.set_defaults(func=_train)

    p = sub.add_parser("eval", help="greedy evaluation of a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--algo", choices=["ddpg", "td3", "sac"],
                   help="fail unless the checkpoint holds this algorithm")
    p.set_defaults(func=_eval)

    p = sub.add_parser("plot", help="reward-per-episode curve from a metrics CSV")
    p.add_argument("--metrics", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_plot)

    p = sub.add_parser("serve", help="expose the built-in simulator over TCP")
    p.add_argument("--port", type=int, default=bridge.DEFAULT_PORT)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # surfaced as a one-line message with a nonzero exit
        print(f"uavland {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
