"""Fast invariant checks across all modules, runnable without pytest."""

from __future__ import annotations

import math

import numpy as np

from .barcode import BarcodeSpec, generate, x_dimension
from .certificate import build_certificate, verify_certificate
from .degrade import convolution_matrix, convolve_same, hat_kernel
from .functional import aniso_tv, divergence, f1_value, iso_tv
from .grid import GridImage, read_pgm, threshold, write_pgm
from .lp import brute_force_binary, build_f1_lp, image_from_solution, solve
from .restore import denoise_f2


def _pgm_roundtrip(rng):
    img = GridImage(rng.random((5, 7)))
    back = read_pgm(write_pgm(img, 65535))
    return np.abs(back.values - img.values).max() <= 0.5 / 65535 + 1e-15


def _barcode_omega(rng):
    return all(generate(BarcodeSpec(4, 4, p, 1, 0.5, seed=s)).omega_pixels >= p for p in (2, 5) for s in range(5))


def _conv_matrix(rng):
    img = GridImage(rng.random((9, 11)))
    k = hat_kernel(3)
    mat = convolution_matrix(k, 11, 9) @ img.flat()
    return np.abs(mat - convolve_same(img, k).flat()).max() <= 1e-14


def _tv_equivalence(rng):
    ok = True
    for _ in range(20):
        u = rng.normal(size=(8, 8))
        iso, an = iso_tv(u), aniso_tv(u)
        ok &= iso <= an + 1e-12 and an <= math.sqrt(2) * iso + 1e-12
    return ok


def _coarea(rng):
    u = rng.integers(0, 6, size=(10, 10))
    return abs(aniso_tv(u) - sum(aniso_tv((u > t).astype(float)) for t in range(5))) <= 1e-9


def _adjoint(rng):
    u = rng.normal(size=(6, 9))
    v1, v2 = rng.normal(size=(6, 8)), rng.normal(size=(5, 9))
    lhs = (np.diff(u, axis=1) * v1).sum() + (np.diff(u, axis=0) * v2).sum()
    return abs(lhs + (u * divergence(v1, v2).values).sum()) <= 1e-12


def _certificate(rng):
    for p in (4, 8):
        code = generate(BarcodeSpec(3, 3, p, 1, 0.5, seed=int(rng.integers(1 << 31))))
        rep = verify_certificate(code.image, build_certificate(code), 4.0 / p)
        if not rep.passed or rep.inf_norm_div > 4.0 / p + 1e-9:
            return False
    return True


def _lp_clean_recovery(rng):
    code = generate(BarcodeSpec(2, 2, 4, 1, 0.5, seed=3))
    f = code.image.to_grid()
    lp = build_f1_lp(f, 2.0)
    sol = solve(lp)
    return sol.optimal and np.abs(image_from_solution(lp, sol).values - f.values).max() <= 1e-6


def _convexification(rng):
    f = GridImage(np.clip(rng.integers(0, 2, size=(3, 3)) + 0.3 * rng.normal(size=(3, 3)), -1, 2))
    lam = 1.5
    rel = threshold(denoise_f2(f, lam).output, 0.5).to_grid()
    best = brute_force_binary(f, lam).to_grid()
    return f1_value(rel, f, lam) <= f1_value(best, f, lam) + 1e-6


def _threshold_idempotent(rng):
    b = generate(BarcodeSpec(2, 2, 3, 1, 0.5, seed=1)).image
    return threshold(b.to_grid(), 0.3) == b and x_dimension(b.transpose()) == x_dimension(b)


CHECKS = {
    "pgm_roundtrip": _pgm_roundtrip,
    "barcode_omega": _barcode_omega,
    "threshold_idempotent": _threshold_idempotent,
    "convolution_matrix": _conv_matrix,
    "tv_equivalence": _tv_equivalence,
    "coarea": _coarea,
    "adjoint": _adjoint,
    "certificate": _certificate,
    "lp_clean_recovery": _lp_clean_recovery,
    "convexification": _convexification,
}


def run_selftest(seed: int = 0) -> dict[str, bool]:
    rng = np.random.default_rng(seed)
    return {name: bool(check(rng)) for name, check in CHECKS.items()}
