"""Entry point: python -m ktrack_adapter --mode mock --dataset ds.json ..."""

import argparse
import sys

from .serve import MockConfig, serve_mock


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="ktrack_adapter",
        description="Reference stdio adapter: dataset-replay mock tracker",
    )
    ap.add_argument("--mode", choices=["mock"], default="mock",
                    help="shim mode is a code template, see shim.py")
    ap.add_argument("--dataset", required=True, help="version-1 dataset JSON to replay")
    ap.add_argument("--noise-std", type=float, default=0.0)
    ap.add_argument("--failure-prob", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--name", default="mock")
    ap.add_argument("--cost-hint", type=float, default=556.0)
    args = ap.parse_args(argv)

    cfg = MockConfig(
        dataset_path=args.dataset,
        noise_std=args.noise_std,
        failure_prob=args.failure_prob,
        seed=args.seed,
        name=args.name,
        cost_hint_ms=args.cost_hint,
    )
    return serve_mock(cfg)


if __name__ == "__main__":
    sys.exit(main())
