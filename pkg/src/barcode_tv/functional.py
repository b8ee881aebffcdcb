"""Finite differences, total variation and the restoration functionals.

All quantities are on the pixel grid with the spacing factored out: the
continuum total variation is about ``h * aniso_tv`` and the continuum L1
fidelity about ``h**2 * sum|u - f|``. The fidelity weight is the
dimensionless ``lambda_bar = lambda * h``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .degrade import HatKernel, convolve_same
from .grid import GridImage

__all__ = [
    "DiffOperators",
    "forward_diff_matrices",
    "grad",
    "aniso_tv",
    "iso_tv",
    "divergence",
    "f1_value",
    "f2_value",
    "f3_value",
    "f2_cost",
    "BOX_TOL",
]

BOX_TOL = 1e-6


@dataclass(frozen=True)
class DiffOperators:
    """Forward differences on a row-major grid, ``x`` = column index.

    ``dx`` has one row per horizontal neighbour pair, ordered like a
    ``(height, width - 1)`` array; ``dy`` likewise for ``(height - 1, width)``.
    """

    dx: sp.csr_matrix
    dy: sp.csr_matrix
    width: int
    height: int

    @property
    def stacked(self) -> sp.csr_matrix:
        return sp.vstack([self.dx, self.dy], format="csr")


def _diff_1d(n: int) -> sp.csr_matrix:
    return sp.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1], shape=(n - 1, n), format="csr")


def forward_diff_matrices(width: int, height: int) -> DiffOperators:
    if width < 2 or height < 2:
        raise ValueError("difference operators need width, height >= 2")
    dx = sp.kron(sp.identity(height), _diff_1d(width), format="csr")
    dy = sp.kron(_diff_1d(height), sp.identity(width), format="csr")
    return DiffOperators(dx, dy, width, height)


def _values(img) -> np.ndarray:
    return img.values if isinstance(img, GridImage) else np.asarray(img, dtype=float)


def grad(img) -> tuple[np.ndarray, np.ndarray]:
    """Forward differences as arrays of shape ``(H, W-1)`` and ``(H-1, W)``."""
    u = _values(img)
    return np.diff(u, axis=1), np.diff(u, axis=0)


def aniso_tv(img) -> float:
    gx, gy = grad(img)
    return float(np.abs(gx).sum() + np.abs(gy).sum())


def iso_tv(img) -> float:
    u = _values(img)
    gx = np.zeros_like(u)
    gy = np.zeros_like(u)
    gx[:, :-1], gy[:-1, :] = grad(u)
    return float(np.sqrt(gx**2 + gy**2).sum())


def divergence(v1, v2) -> GridImage:
    """Negative adjoint of the forward differences.

    ``v1`` lives on horizontal edges ``(H, W-1)`` and ``v2`` on vertical
    edges ``(H-1, W)``; the result satisfies
    ``<grad u, v> = -<u, div v>`` exactly for every ``u``.
    """
    a, b = _values(v1), _values(v2)
    h, w = a.shape[0], a.shape[1] + 1
    if b.shape != (h - 1, w):
        raise ValueError(f"incompatible edge fields {a.shape} and {b.shape}")
    out = np.zeros((h, w))
    out[:, :-1] += a
    out[:, 1:] -= a
    out[:-1, :] += b
    out[1:, :] -= b
    return GridImage(out)


def _check_pair(u, f):
    if _values(u).shape != _values(f).shape:
        raise ValueError(f"shape mismatch {_values(u).shape} vs {_values(f).shape}")


def f1_value(u, f, lambda_bar: float) -> float:
    _check_pair(u, f)
    return aniso_tv(u) + lambda_bar * float(np.abs(_values(u) - _values(f)).sum())


def f2_cost(f) -> np.ndarray:
    """Pixelwise linear cost ``|1 - f| - |f|`` of the relaxed binary problem."""
    fv = _values(f)
    return np.abs(1.0 - fv) - np.abs(fv)


def f2_value(v, f, lambda_bar: float) -> float:
    _check_pair(v, f)
    vv = _values(v)
    if vv.min() < -BOX_TOL or vv.max() > 1 + BOX_TOL:
        raise ValueError("relaxed variable leaves [0, 1]")
    return aniso_tv(vv) + lambda_bar * float((f2_cost(f) * vv).sum())


def f3_value(u, f, lambda_bar: float, k: HatKernel) -> float:
    _check_pair(u, f)
    ku = convolve_same(u if isinstance(u, GridImage) else GridImage(u), k)
    return aniso_tv(u) + lambda_bar * float(np.abs(ku.values - _values(f)).sum())
