"""Command line interface.

Exit codes: 0 success, 1 verification or I/O failure, 2 usage error.
PGM files are read and written with black = 0, which maps to foreground 1
internally.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .barcode import Barcode, BarcodeSpec, generate
from .certificate import build_certificate, verify_certificate
from .degrade import NoiseSpec, add_gaussian_noise, convolve_same, hat_kernel, snr_db
from .experiments import PROFILES, experiment_figure
from .functional import aniso_tv, f1_value, f2_value, f3_value
from .grid import GridImage, PgmError, read_pgm, threshold, write_pgm
from .ipm import SolverTolerances
from .lp import brute_force_binary
from .restore import SolverFailure, restore, sweep_csv, sweep_lambda
from .selftest import run_selftest

__all__ = ["RunConfig", "run", "main", "build_parser"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on: the subcommand and its parsed flags."""

    command: str
    options: dict = field(default_factory=dict)

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        opts = {k: v for k, v in vars(ns).items() if k not in ("command", "handler")}
        return cls(ns.command, opts)

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def load_image(path) -> GridImage:
    return read_pgm(Path(path).read_bytes(), invert=True)


def save_image(path, img: GridImage):
    Path(path).write_bytes(write_pgm(img, 255, invert=True))


def meta_path(path) -> Path:
    return Path(path).with_suffix(".meta")


def _modules(text: str) -> tuple[int, int]:
    try:
        mx, my = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    return mx, my


def _lambdas(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _tol(cfg: RunConfig) -> SolverTolerances:
    return SolverTolerances(eps=cfg.eps, max_iter=cfg.max_iter)


def _kernel(cfg: RunConfig):
    return hat_kernel(cfg.blur_radius)


def _write_kv_csv(rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("key", "value"))
    for key, value in rows:
        writer.writerow((key, repr(value) if isinstance(value, float) else value))


def cmd_generate(cfg: RunConfig) -> int:
    mx, my = cfg.modules
    spec = BarcodeSpec(mx, my, cfg.ppm, cfg.margin, cfg.density, cfg.seed)
    code = generate(spec)
    save_image(cfg.output, code.image.to_grid())
    meta_path(cfg.output).write_text(
        f"omega_pixels={code.omega_pixels}\npixels_per_module={cfg.ppm}\nseed={cfg.seed}\n"
    )
    print(f"generate: {cfg.output} {code.image.width}x{code.image.height} omega_pixels={code.omega_pixels}")
    return EXIT_OK


def cmd_degrade(cfg: RunConfig) -> int:
    clean = load_image(cfg.input)
    k = _kernel(cfg)
    noisy = add_gaussian_noise(convolve_same(clean, k), NoiseSpec(cfg.noise, cfg.seed))
    save_image(cfg.output, noisy)
    try:
        value = snr_db(clean, noisy)
    except ValueError:
        value = float("nan")
    src, dst = meta_path(cfg.input), meta_path(cfg.output)
    lines = src.read_text() if src.exists() and src != dst else ""
    if lines and not lines.endswith("\n"):
        lines += "\n"
    lines += f"blur_radius={cfg.blur_radius}\nnoise={cfg.noise!r}\nnoise_seed={cfg.seed}\nsnr_db={value!r}\n"
    dst.write_text(lines)
    print(f"degrade: {cfg.output} snr_db={value:.4f}")
    return EXIT_OK


def _reference(cfg: RunConfig):
    if cfg.reference is None:
        return None
    return threshold(load_image(cfg.reference), 0.5)


def cmd_restore(cfg: RunConfig) -> int:
    f = load_image(cfg.input)
    rep = restore(f, cfg.method, cfg.lambda_bar, _kernel(cfg), cfg.threshold, _reference(cfg), _tol(cfg))
    save_image(cfg.output, rep.output)
    if cfg.binary_output:
        save_image(cfg.binary_output, rep.binary_output.to_grid())
    if cfg.report:
        rows = list(rep.summary().items()) + [("threshold", rep.threshold)] + list(rep.solver.items())
        with open(cfg.report, "w", newline="") as fh:
            _write_kv_csv(rows, fh)
    err = "" if rep.pixel_error_vs_reference is None else f" pixel_error={rep.pixel_error_vs_reference:.6g}"
    print(f"restore: {cfg.method} lambda_bar={cfg.lambda_bar:g} objective={rep.objective:.10g}{err}")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    u, f = load_image(cfg.u), load_image(cfg.f)
    lam = cfg.lambda_bar
    if cfg.functional == "f1":
        value = f1_value(u, f, lam)
    elif cfg.functional == "f2":
        value = f2_value(u, f, lam)
    else:
        value = f3_value(u, f, lam, _kernel(cfg))
    tv = aniso_tv(u)
    print(f"value={value!r}")
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("tv", "fidelity"))
    writer.writerow((repr(tv), repr(value - tv)))
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    img = threshold(load_image(cfg.input), 0.5)
    try:
        code = Barcode(img)
        field_ = build_certificate(code)
    except ValueError as exc:
        print(f"certify: not a certifiable bar code: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rep = verify_certificate(img, field_, cfg.lambda_bar)
    _write_kv_csv([("omega_pixels", code.omega_pixels)] + rep.rows(), sys.stdout)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_sweep(cfg: RunConfig) -> int:
    f = load_image(cfg.input)
    items = sweep_lambda(f, cfg.method, cfg.lambdas, _kernel(cfg), cfg.threshold, _reference(cfg), _tol(cfg))
    text = sweep_csv(items)
    if cfg.report:
        Path(cfg.report).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg.out_dir:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for it in items:
            if it.report is not None:
                save_image(out / f"{cfg.method}_lam{it.lambda_bar:g}.pgm", it.report.output)
    failed = sum(it.report is None for it in items)
    print(f"sweep: {len(items)} items, {failed} failed", file=sys.stderr if not cfg.report else sys.stdout)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_oracle_check(cfg: RunConfig) -> int:
    """Relaxed-and-thresholded minimizer against exhaustive binary search."""
    side = int(np.floor(np.sqrt(cfg.max_pixels)))
    if side < 2 or side * side > 20:
        raise UsageError("--max-pixels must be between 4 and 20")
    rng = np.random.default_rng(cfg.seed)
    worst = -np.inf
    failures = 0
    for _ in range(cfg.trials):
        bits = rng.integers(0, 2, size=(side, side))
        f = GridImage(bits + cfg.noise * rng.normal(size=bits.shape))
        relaxed = restore(f, "f2", cfg.lambda_bar, tol=_tol(cfg)).binary_output.to_grid()
        exact = brute_force_binary(f, cfg.lambda_bar).to_grid()
        gap = f1_value(relaxed, f, cfg.lambda_bar) - f1_value(exact, f, cfg.lambda_bar)
        worst = max(worst, gap)
        failures += gap > 1e-6
    print(f"oracle-check: trials={cfg.trials} pixels={side * side} worst_gap={worst:.3e} failures={failures}")
    return EXIT_FAIL if failures else EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    results = run_selftest(cfg.seed)
    for name, ok in results.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    failed = [n for n, ok in results.items() if not ok]
    print(f"selftest: {len(results) - len(failed)}/{len(results)} passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_experiment(cfg: RunConfig) -> int:
    rows = experiment_figure(cfg.profile, cfg.out, cfg.seed)
    print(f"experiment: {cfg.profile} -> {cfg.out} ({len(rows)} panels)")
    return EXIT_OK


def _solver_flags(p):
    p.add_argument("--eps", type=float, default=1e-8, help="solver tolerance")
    p.add_argument("--max-iter", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="barcode-tv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="random matrix bar code")
    p.add_argument("--modules", type=_modules, default=(4, 4), help="module grid WxH")
    p.add_argument("--ppm", type=int, default=8, help="pixels per module")
    p.add_argument("--margin", type=int, default=1, help="white margin in modules")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("output")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("degrade", help="hat blur plus Gaussian noise")
    p.add_argument("--blur-radius", type=int, default=1)
    p.add_argument("--noise", type=float, default=0.0, help="noise standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(handler=cmd_degrade)

    p = sub.add_parser("restore", help="minimize F1, F2 or F3")
    p.add_argument("--method", choices=("f1", "f2", "f3"), required=True)
    p.add_argument("--lambda-bar", type=float, required=True)
    p.add_argument("--blur-radius", type=int, default=1)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--reference", help="clean bar code for pixel_error")
    p.add_argument("--binary-output", help="also write the thresholded result")
    p.add_argument("--report", help="key,value CSV report")
    _solver_flags(p)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(handler=cmd_restore)

    p = sub.add_parser("evaluate", help="evaluate a functional at an image")
    p.add_argument("--functional", choices=("f1", "f2", "f3"), required=True)
    p.add_argument("--lambda-bar", type=float, required=True)
    p.add_argument("--blur-radius", type=int, default=1)
    p.add_argument("u")
    p.add_argument("f")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("certify", help="build and verify the dual certificate")
    p.add_argument("--lambda-bar", type=float, required=True)
    p.add_argument("input")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("sweep", help="restorations over a list of lambda_bar values")
    p.add_argument("--method", choices=("f1", "f2", "f3"), required=True)
    p.add_argument("--lambdas", type=_lambdas, required=True)
    p.add_argument("--blur-radius", type=int, default=1)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--reference")
    p.add_argument("--report")
    p.add_argument("--out-dir")
    _solver_flags(p)
    p.add_argument("input")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("oracle-check", help="F2 thresholding against brute force")
    p.add_argument("--max-pixels", type=int, default=16)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--lambda-bar", type=float, default=1.5)
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    _solver_flags(p)
    p.set_defaults(handler=cmd_oracle_check)

    p = sub.add_parser("selftest", help="quick invariant checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_selftest)

    p = sub.add_parser("experiment", help="run a seeded experiment profile")
    p.add_argument("profile", choices=sorted(PROFILES))
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.set_defaults(handler=cmd_experiment)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    cfg = RunConfig.from_namespace(ns)
    try:
        return ns.handler(cfg)
    except UsageError as exc:
        print(f"barcode-tv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, PgmError, SolverFailure, ValueError) as exc:
        print(f"barcode-tv: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
