"""Noiseless deblurring with a radius 8 hat kernel over several lambda_bar.

Usage: python scripts/fig5.py [--out results] [--seed 0]
"""

import argparse
import time
from pathlib import Path

from barcode_tv.experiments import PROFILES, experiment_figure

PROFILE_NAMES = ("fig5",)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="parent output directory")
    parser.add_argument("--seed", type=int, default=0, help="noise seed")
    args = parser.parse_args()
    for name in PROFILE_NAMES:
        t0 = time.perf_counter()
        rows = experiment_figure(name, Path(args.out) / name, args.seed)
        print(f"{name}: {PROFILES[name].description} ({time.perf_counter() - t0:.1f}s)")
        for row in rows:
            print(f"  {row['panel']:<24} pixel_error={float(row['pixel_error']):.6f} iterations={row['iterations']}")


if __name__ == "__main__":
    main()
