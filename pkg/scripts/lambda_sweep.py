"""Pixel error against lambda_bar for F1 and F2 on one noisy bar code.

Usage: python scripts/lambda_sweep.py [--noise 0.2] [--out sweep.csv]
"""

import argparse

from barcode_tv.barcode import BarcodeSpec, generate
from barcode_tv.degrade import NoiseSpec, add_gaussian_noise
from barcode_tv.restore import sweep_csv, sweep_lambda


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modules", type=int, default=4)
    parser.add_argument("--ppm", type=int, default=8)
    parser.add_argument("--code-seed", type=int, default=1)
    parser.add_argument("--noise", type=float, default=0.2)
    parser.add_argument("--noise-seed", type=int, default=0)
    parser.add_argument("--lambdas", default="0.25,0.5,1,2,4,8,16,32,75")
    parser.add_argument("--out", help="write CSV here (prefixed by a method column)")
    args = parser.parse_args()

    code = generate(BarcodeSpec(args.modules, args.modules, args.ppm, 1, 0.5, args.code_seed))
    f = add_gaussian_noise(code.image.to_grid(), NoiseSpec(args.noise, args.noise_seed))
    lambdas = [float(t) for t in args.lambdas.split(",")]
    lines = []
    for method in ("f1", "f2"):
        text = sweep_csv(sweep_lambda(f, method, lambdas, reference=code.image))
        body = text.splitlines()
        if not lines:
            lines.append("method," + body[0])
        lines += [f"{method},{row}" for row in body[1:]]
    out = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    print(out, end="")
    print(f"omega_pixels={code.omega_pixels} certificate bound 4/omega={4 / code.omega_pixels:.4g}")


if __name__ == "__main__":
    main()
