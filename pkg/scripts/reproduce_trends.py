#!/usr/bin/env python3
"""End-to-end desk-scale reproduction: sweep + ablation + charts.

Writes results tables and SVG charts under --out-dir (default ./results).
Everything is seeded; running twice produces identical tables.
"""

import argparse
import sys
from pathlib import Path

from ktrack.cli import main as ktrack


def run(argv):
    code = ktrack(argv)
    if code != 0:
        sys.exit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--seeds", type=int, default=3, help="seeds per sweep cell")
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = str(args.seed)

    # Accuracy vs interval across grid sizes (sinusoidal motion stresses
    # longer horizons; N=0 is the per-frame baseline for retention).
    run(
        [
            "sweep",
            "--out", str(out / "sweep_sinusoidal.csv"),
            "--kind", "sinusoidal",
            "--frames", "150",
            "--amplitude", "10", "--period", "40", "--speed", "1.0",
            "--ns", "0,2,3,5,10,15",
            "--grids", "10,15,20,28,32",
            "--predictors", "full-kalman",
            "--oracle-noise", "1.0",
            "--seeds", str(args.seeds),
            "--seed", seed,
        ]
    )

    # Predictor variants + warmup counts at N=5 on constant-velocity data.
    run(
        [
            "ablate",
            "--out", str(out / "ablation_cv.csv"),
            "--kind", "constant-velocity",
            "--frames", "100",
            "--grid", "20",
            "--n", "5",
            "--oracle-noise", "1.0",
            "--sigma-m", "1.0",
            "--seed", seed,
        ]
    )

    # Warmup sensitivity on jerky motion (constant-velocity assumption
    # violated inside segments).
    run(
        [
            "ablate",
            "--out", str(out / "ablation_jerky.csv"),
            "--kind", "piecewise-acceleration",
            "--frames", "100",
            "--grid", "20",
            "--n", "5",
            "--accel-bound", "0.5", "--segment-len", "20",
            "--oracle-noise", "1.0",
            "--sigma-p", "0.2", "--sigma-m", "1.0",
            "--seed", seed,
        ]
    )

    run(["report", "--results", str(out / "sweep_sinusoidal.csv"), "--out-dir", str(out / "charts")])
    print(f"done; see {out}/")


if __name__ == "__main__":
    main()
