"""Time a full analyze run on a synthetic pattern at forest-survey scale.

37 types with the per-species counts of the Duke Forest sample (10053
points), gamma-distributed marks, default 17 x 32 grid and h = 3.

    python scripts/desk_scale_benchmark.py [--workers N] [--keep DIR]
"""
import argparse
import tempfile
import time
from pathlib import Path

import numpy as np

from msdgm.cli import main as cli_main
from msdgm.pattern import dumps_pattern, from_arrays

SPECIES_COUNTS = [26, 121, 45, 171, 33, 16, 276, 26, 921, 40, 24, 325, 159, 770, 333, 361, 46, 281, 49, 34,
                  2437, 30, 24, 43, 96, 33, 48, 1507, 21, 291, 2, 9, 482, 13, 209, 11, 740]


def synthetic_forest(seed=0, extent=(1000.0, 500.0)):
    rng = np.random.default_rng(seed)
    n = sum(SPECIES_COUNTS)
    labels = np.repeat([f"species_{k:02d}" for k in range(len(SPECIES_COUNTS))], SPECIES_COUNTS)
    x = rng.uniform(0, extent[0], n)
    y = rng.uniform(0, extent[1], n)
    dbh = rng.gamma(2.0, 10.0, n)
    return from_arrays(x, y, labels, dbh)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--workers", default="1")
    ap.add_argument("--keep", default=None)
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / "forest.csv"
        src.write_text(dumps_pattern(synthetic_forest()))
        out = args.keep or str(Path(tmp) / "out")
        t = time.perf_counter()
        code = cli_main(["analyze", str(src), "--out", out, "--bandwidth", "3", "--workers", args.workers])
        print(f"exit={code} elapsed={time.perf_counter() - t:.2f}s")


if __name__ == "__main__":
    main()
