"""Blur kernels, convolution, additive noise and SNR."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.signal import convolve2d

from .grid import GridImage

__all__ = [
    "HatKernel",
    "NoiseSpec",
    "hat_kernel",
    "convolve_same",
    "convolution_matrix",
    "gaussian_stream",
    "add_gaussian_noise",
    "snr_db",
]


@dataclass(frozen=True)
class HatKernel:
    """Separable hat blur of radius ``r``; support is ``(2r-1) x (2r-1)``.

    Weights are kept as integer numerators over ``r**4`` so they sum to one
    exactly.
    """

    radius: int

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("kernel radius must be >= 1")

    @property
    def profile_numerators(self) -> np.ndarray:
        r = self.radius
        return np.concatenate((np.arange(1, r + 1), np.arange(r - 1, 0, -1))).astype(np.int64)

    @property
    def numerators(self) -> np.ndarray:
        p = self.profile_numerators
        return np.outer(p, p)

    @property
    def denominator(self) -> int:
        return self.radius**4

    @property
    def profile(self) -> np.ndarray:
        return self.profile_numerators / self.radius**2

    @cached_property
    def weights(self) -> np.ndarray:
        return self.numerators / self.denominator

    @property
    def size(self) -> int:
        return 2 * self.radius - 1

    @property
    def is_identity(self) -> bool:
        return self.radius == 1


@dataclass(frozen=True)
class NoiseSpec:
    amplitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("noise amplitude must be >= 0")


def hat_kernel(r: int) -> HatKernel:
    return HatKernel(r)


def convolve_same(img: GridImage, k: HatKernel) -> GridImage:
    """Zero-padded convolution with output cropped to the input size."""
    if k.is_identity:
        return img
    out = convolve2d(img.values, k.weights, mode="same", boundary="fill", fillvalue=0.0)
    return GridImage(out, img.spacing)


def convolution_matrix(k: HatKernel, width: int, height: int) -> sp.csr_matrix:
    """Sparse ``(W*H) x (W*H)`` matrix acting on row-major vectorized images."""
    n = width * height
    if k.is_identity:
        return sp.identity(n, format="csr")
    r1 = k.radius - 1
    w = k.weights
    iy, ix = np.divmod(np.arange(n), width)
    rows, cols, vals = [], [], []
    for a in range(-r1, r1 + 1):
        for b in range(-r1, r1 + 1):
            # out[y, x] += w[a, b] * in[y - a, x - b]
            sy, sx = iy - a, ix - b
            ok = (sy >= 0) & (sy < height) & (sx >= 0) & (sx < width)
            rows.append(np.flatnonzero(ok))
            cols.append(sy[ok] * width + sx[ok])
            vals.append(np.full(ok.sum(), w[a + r1, b + r1]))
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(counter: np.ndarray, seed: int) -> np.ndarray:
    """SplitMix64 output for the given counters (wrapping uint64 arithmetic)."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (counter + np.uint64(1)) * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def gaussian_stream(n: int, seed: int) -> np.ndarray:
    """First ``n`` standard normals of the counter-based stream for ``seed``.

    Normal ``i`` uses counters ``2i`` and ``2i+1`` through SplitMix64, takes
    the top 53 bits of each as uniforms in ``(0, 1]`` and applies the cosine
    branch of Box-Muller.
    """
    counters = np.arange(2 * n, dtype=np.uint64)
    bits = _splitmix64(counters, seed) >> np.uint64(11)
    uni = (bits.astype(np.float64) + 1.0) * 2.0**-53
    u1, u2 = uni[0::2], uni[1::2]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def add_gaussian_noise(img: GridImage, spec: NoiseSpec) -> GridImage:
    if spec.amplitude == 0:
        return img
    z = gaussian_stream(img.values.size, spec.seed).reshape(img.shape)
    return GridImage(img.values + spec.amplitude * z, img.spacing)


def snr_db(clean: GridImage, noisy: GridImage) -> float:
    """``10 log10(sum clean^2 / sum (noisy - clean)^2)``; ``inf`` if identical."""
    if clean.shape != noisy.shape:
        raise ValueError(f"shape mismatch {clean.shape} vs {noisy.shape}")
    signal = float(np.sum(clean.values**2))
    if signal == 0:
        raise ValueError("clean image has zero power")
    noise = float(np.sum((noisy.values - clean.values) ** 2))
    if noise == 0:
        return math.inf
    return 10.0 * math.log10(signal / noise)
