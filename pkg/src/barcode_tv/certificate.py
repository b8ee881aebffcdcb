"""Dual vector fields certifying that a bar code minimizes the L1-TV energy.

A field ``v = (v1, v2)`` on the grid edges certifies ``u`` when
``max(|v1|, |v2|) <= 1``, ``-<u, div v> = aniso_tv(u)`` and the fidelity
weight is at least ``||div v||_inf``. For a bar code with X-dimension
``omega`` pixels the per-line piecewise linear construction below yields
``||div v||_inf <= 4 / omega``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .barcode import Barcode, border_width
from .functional import aniso_tv, divergence
from .grid import BinaryImage

__all__ = ["VectorField", "CertificateReport", "build_certificate", "line_profile", "verify_certificate"]

NORM_TOL = 1e-9
DUALITY_RTOL = 1e-9
LAMBDA_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class VectorField:
    """``v1`` on horizontal edges ``(H, W-1)``, ``v2`` on vertical edges ``(H-1, W)``."""

    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        v1 = np.array(self.v1, dtype=float)
        v2 = np.array(self.v2, dtype=float)
        if v2.shape != (v1.shape[0] - 1, v1.shape[1] + 1):
            raise ValueError(f"incompatible edge fields {v1.shape} and {v2.shape}")
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)

    @classmethod
    def zeros(cls, height: int, width: int) -> "VectorField":
        return cls(np.zeros((height, width - 1)), np.zeros((height - 1, width)))

    @property
    def pixel_shape(self) -> tuple[int, int]:
        return self.v1.shape[0], self.v1.shape[1] + 1

    def inf_norm(self) -> float:
        return float(max(np.abs(self.v1).max(initial=0.0), np.abs(self.v2).max(initial=0.0)))

    def divergence(self) -> np.ndarray:
        return divergence(self.v1, self.v2).values


@dataclass(frozen=True)
class CertificateReport:
    inf_norm_v: float
    inf_norm_div: float
    duality_lhs: float
    tv_value: float
    lambda_bar: float
    conditions_met: dict = field(default_factory=dict)

    @property
    def lambda_bound(self) -> float:
        return self.inf_norm_div

    @property
    def passed(self) -> bool:
        return all(self.conditions_met.values())

    def rows(self) -> list[tuple[str, object]]:
        out = [
            ("inf_norm_v", self.inf_norm_v),
            ("inf_norm_div", self.inf_norm_div),
            ("duality_lhs", self.duality_lhs),
            ("tv_value", self.tv_value),
            ("lambda_bar", self.lambda_bar),
            ("lambda_bound", self.lambda_bound),
        ]
        out += [(f"condition_{k}", int(v)) for k, v in self.conditions_met.items()]
        out.append(("passed", int(self.passed)))
        return out


def line_profile(line: np.ndarray, ramp: int) -> np.ndarray:
    """Edge values of one row (or column) of the certificate.

    Edge ``e`` sits between pixels ``e`` and ``e + 1``. Jumps up get ``+1``,
    jumps down ``-1``; values are linear in between and fall linearly to zero
    over ``ramp`` edges outside the first and last jump.
    """
    n = line.size
    d = np.diff(line.astype(np.int64))
    jumps = np.flatnonzero(d)
    out = np.zeros(n - 1)
    if jumps.size == 0:
        return out
    # virtual anchors with value 0; may sit on the virtual edges -1 and n-1
    lo, hi = jumps[0] - ramp, jumps[-1] + ramp
    if lo < -1 or hi > n - 1:
        raise ValueError("white frame too narrow for the ramp")
    knots = np.concatenate(([lo], jumps, [hi]))
    heights = np.concatenate(([0.0], np.sign(d[jumps]).astype(float), [0.0]))
    edges = np.arange(n - 1)
    return np.interp(edges, knots, heights, left=0.0, right=0.0)


def build_certificate(b: Barcode) -> VectorField:
    """Per-row ``v1`` and per-column ``v2`` built with ramps of ``omega`` edges."""
    omega = b.omega_pixels
    bits = b.image.bits
    if omega < 2:
        raise ValueError("certificate construction needs omega_pixels >= 2")
    if border_width(b.image) < omega:
        raise ValueError("white frame narrower than omega_pixels")
    v1 = np.stack([line_profile(row, omega) for row in bits])
    v2 = np.stack([line_profile(col, omega) for col in bits.T]).T
    return VectorField(v1, v2)


def verify_certificate(u: BinaryImage, v: VectorField, lambda_bar: float) -> CertificateReport:
    if u.shape != v.pixel_shape:
        raise ValueError(f"image {u.shape} does not match field grid {v.pixel_shape}")
    uf = u.bits.astype(float)
    div = v.divergence()
    norm_v = v.inf_norm()
    norm_div = float(np.abs(div).max())
    lhs = float(-(uf * div).sum())
    tv = aniso_tv(uf)
    met = {
        "bounded": norm_v <= 1 + NORM_TOL,
        "div_finite": bool(np.isfinite(norm_div)),
        "duality": abs(lhs - tv) <= DUALITY_RTOL * max(1.0, tv),
        "lambda": lambda_bar >= norm_div - LAMBDA_TOL,
    }
    return CertificateReport(norm_v, norm_div, lhs, tv, float(lambda_bar), met)
