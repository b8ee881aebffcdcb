"""Random matrix bar codes and X-dimension measurement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BinaryImage

__all__ = [
    "BarcodeSpec",
    "Barcode",
    "generate",
    "x_dimension",
    "is_in_B_omega",
    "border_width",
]

MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class BarcodeSpec:
    modules_x: int = 4
    modules_y: int = 4
    pixels_per_module: int = 8
    margin_modules: int = 1
    fill_density: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.modules_x < 1 or self.modules_y < 1:
            raise ValueError("module counts must be >= 1")
        if self.pixels_per_module < 1:
            raise ValueError("pixels_per_module must be >= 1")
        if self.margin_modules < 1:
            raise ValueError("margin_modules must be >= 1")
        if not 0 < self.fill_density <= 1:
            raise ValueError("fill_density must lie in (0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        p, m = self.pixels_per_module, self.margin_modules
        return ((self.modules_y + 2 * m) * p, (self.modules_x + 2 * m) * p)


@dataclass(frozen=True, eq=False)
class Barcode:
    image: BinaryImage
    omega_pixels: int = 0

    def __post_init__(self):
        omega = x_dimension(self.image)
        object.__setattr__(self, "omega_pixels", omega)
        if border_width(self.image) < omega:
            raise ValueError(
                f"white frame ({border_width(self.image)} px) narrower than X-dimension ({omega} px)"
            )

    def __eq__(self, other):
        if not isinstance(other, Barcode):
            return NotImplemented
        return self.image == other.image


def _runs(line: np.ndarray):
    """Yield (value, start, length) for maximal constant runs."""
    change = np.flatnonzero(np.diff(line)) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [line.size]))
    for s, e in zip(starts, ends):
        yield line[s], s, e - s


def x_dimension(img: BinaryImage) -> int:
    """Shortest run over all rows and columns, black or white.

    White runs touching the image border are ignored: they stand for the
    unbounded background around the code.
    """
    bits = img.bits
    if not bits.any():
        raise ValueError("x_dimension is undefined for an all-white image")
    best = max(bits.shape)
    for lines in (bits, bits.T):
        for line in lines:
            if not line.any():
                continue
            for value, start, length in _runs(line):
                if value == 0 and (start == 0 or start + length == line.size):
                    continue
                best = min(best, int(length))
    return best


def border_width(img: BinaryImage) -> int:
    """Width of the all-white frame around the foreground."""
    rows = np.flatnonzero(img.bits.any(axis=1))
    cols = np.flatnonzero(img.bits.any(axis=0))
    if rows.size == 0:
        return min(img.shape)
    h, w = img.shape
    return int(min(rows[0], cols[0], h - 1 - rows[-1], w - 1 - cols[-1]))


def is_in_B_omega(img: BinaryImage, omega: int) -> bool:
    if omega < 1:
        raise ValueError("omega must be >= 1")
    return bool(img.bits.any()) and x_dimension(img) >= omega


def generate(spec: BarcodeSpec) -> Barcode:
    """Draw an i.i.d. module pattern.

    Samples that are all white, or whose X-dimension exceeds the white
    frame, are redrawn from the next stream of the same seed.
    """
    p, m = spec.pixels_per_module, spec.margin_modules
    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng([spec.seed & 0xFFFFFFFFFFFFFFFF, attempt])
        modules = rng.random((spec.modules_y, spec.modules_x)) < spec.fill_density
        if not modules.any():
            continue
        framed = np.pad(modules, m).astype(np.uint8)
        bits = np.kron(framed, np.ones((p, p), dtype=np.uint8))
        img = BinaryImage(bits)
        if x_dimension(img) > m * p:
            continue
        return Barcode(img)
    raise ValueError(f"no admissible sample after {MAX_ATTEMPTS} draws for {spec}")
