"""Pixel grids, binary images and PGM input/output.

Images are stored as ``(height, width)`` numpy arrays in row-major order with
the top row first; ``x`` is the column index. Intensities live in ``[0, 1]``
with ``1`` meaning black (bar code foreground). PGM uses the opposite
convention (``0`` is black), so the file helpers take an ``invert`` flag that
the command line layer sets on both reading and writing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridImage",
    "BinaryImage",
    "PgmError",
    "read_pgm",
    "write_pgm",
    "threshold",
    "pad",
    "crop",
]


class PgmError(ValueError):
    """Raised for malformed or unsupported PGM data."""


@dataclass(frozen=True, eq=False)
class GridImage:
    """Real-valued image on a square grid with spacing ``spacing``."""

    values: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2D array, got shape {arr.shape}")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def flat(self) -> np.ndarray:
        """Row-major vectorization (length ``width * height``)."""
        return self.values.ravel()

    def transpose(self) -> "GridImage":
        return GridImage(self.values.T, self.spacing)

    def __eq__(self, other):
        if not isinstance(other, GridImage):
            return NotImplemented
        return self.spacing == other.spacing and np.array_equal(self.values, other.values)

    @classmethod
    def zeros(cls, height: int, width: int, spacing: float = 1.0) -> "GridImage":
        return cls(np.zeros((height, width)), spacing)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Image whose entries are exactly 0 or 1."""

    bits: np.ndarray = field()

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2D array, got shape {arr.shape}")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("binary image entries must be 0 or 1")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        return int(self.bits.sum())

    def transpose(self) -> "BinaryImage":
        return BinaryImage(self.bits.T)

    def to_grid(self, spacing: float = 1.0) -> GridImage:
        return GridImage(self.bits.astype(float), spacing)

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)


_TOKEN = re.compile(rb"\s*(#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PgmError("malformed PGM header")
        tokens.append(m.group(2))
        pos = m.end()
    return tokens, pos


def read_pgm(data: bytes, spacing: float = 1.0, invert: bool = False) -> GridImage:
    """Decode a P2 (ASCII) or P5 (binary) PGM byte string.

    Pixel values are divided by maxval. With ``invert=True`` the result is
    ``1 - pixel / maxval`` so that black PGM pixels map to foreground 1.
    """
    if len(data) < 2 or data[:2] not in (b"P2", b"P5"):
        raise PgmError(f"unsupported magic number {data[:2]!r}")
    magic = data[:2]
    try:
        (w, h, mx), pos = _header_tokens(data[2:], 3)
        width, height, maxval = int(w), int(h), int(mx)
    except ValueError as exc:
        raise PgmError(f"malformed PGM header: {exc}") from None
    pos += 2
    if width < 1 or height < 1 or not 0 < maxval <= 65535:
        raise PgmError(f"invalid header values {width}x{height} maxval={maxval}")
    n = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or not data[pos : pos + 1].isspace():
            raise PgmError("missing whitespace after PGM header")
        raster = data[pos + 1 :]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        if len(raster) < n * dtype.itemsize:
            raise PgmError("truncated pixel data")
        pixels = np.frombuffer(raster, dtype=dtype, count=n).astype(float)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
        if len(body) < n:
            raise PgmError("truncated pixel data")
        try:
            pixels = np.array([int(t) for t in body[:n]], dtype=float)
        except ValueError:
            raise PgmError("non-integer pixel value") from None
    if np.any(pixels > maxval):
        raise PgmError("pixel value exceeds maxval")

    values = pixels.reshape(height, width) / maxval
    if invert:
        values = 1.0 - values
    return GridImage(values, spacing)


def write_pgm(img: GridImage, maxval: int = 255, invert: bool = False) -> bytes:
    """Encode as binary P5, quantizing ``round(clamp(p, 0, 1) * maxval)``.

    Rounding is half away from zero; values outside ``[0, 1]`` are clamped.
    """
    if maxval not in (255, 65535):
        raise ValueError("maxval must be 255 or 65535")
    values = np.clip(img.values, 0.0, 1.0)
    if invert:
        values = 1.0 - values
    q = np.floor(values * maxval + 0.5).astype(np.int64)
    dtype = ">u2" if maxval > 255 else "u1"
    header = f"P5\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    return header + q.astype(dtype).tobytes()


def threshold(img: GridImage, t: float) -> BinaryImage:
    """Upper level set ``{value >= t}``."""
    if not 0 < t < 1:
        raise ValueError("threshold must lie strictly between 0 and 1")
    return BinaryImage((img.values >= t).astype(np.uint8))


def pad(img: GridImage, margin: int, value: float = 0.0) -> GridImage:
    if margin < 0:
        raise ValueError("margin must be non-negative")
    out = np.pad(img.values, margin, mode="constant", constant_values=value)
    return GridImage(out, img.spacing)


def crop(img: GridImage, margin: int) -> GridImage:
    """Inverse of :func:`pad`."""
    if margin < 0 or 2 * margin >= min(img.shape):
        raise ValueError("margin too large for image")
    if margin == 0:
        return img
    return GridImage(img.values[margin:-margin, margin:-margin], img.spacing)
