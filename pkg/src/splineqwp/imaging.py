"""Image files, symmetric boundary extension and quality metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .containers import CropRecord


@dataclass
class LoadedImage:
    """Pixel data as float64, ``(H, W)`` or ``(H, W, C)``, plus its bit depth."""

    data: np.ndarray
    bit_depth: int

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else self.data.shape[2]

    @property
    def max_value(self) -> int:
        return 2 ** self.bit_depth - 1


def read_image(path) -> LoadedImage:
    """Read a PGM/PNG (8 or 16 bit, grayscale or color) as floats."""
    with Image.open(path) as im:
        im.load()
        mode = im.mode
        if mode in ("1", "P", "LA", "PA", "RGBA", "CMYK", "YCbCr"):
            im = im.convert("RGB" if mode != "LA" else "L")
            mode = im.mode
        arr = np.array(im)
    if mode in ("I", "I;16", "I;16B", "I;16L"):
        bits = 16
    elif mode == "F":
        bits = 0
    else:
        bits = 8
    return LoadedImage(arr.astype(float), bits)


def to_pixels(data: np.ndarray, bit_depth: int = 8) -> np.ndarray:
    """Round and clip floats to the integer range of ``bit_depth``."""
    if bit_depth not in (8, 16):
        raise ValueError(f"bit depth must be 8 or 16, got {bit_depth}")
    dtype = np.uint8 if bit_depth == 8 else np.uint16
    return np.clip(np.rint(data), 0, 2 ** bit_depth - 1).astype(dtype)


def write_image(path, data: np.ndarray, bit_depth: int = 8) -> None:
    """Write a grayscale or RGB image; the format follows the file suffix."""
    pix = to_pixels(np.asarray(data), bit_depth)
    if pix.ndim == 3 and bit_depth == 16:
        raise ValueError("16-bit output supports grayscale only")
    Image.fromarray(pix).save(path)


def normalize_to_bytes(data: np.ndarray) -> np.ndarray:
    """Affine map of ``data`` onto ``0..255`` for viewing."""
    lo, hi = float(np.min(data)), float(np.max(data))
    if hi == lo:
        return np.zeros(data.shape, dtype=np.uint8)
    return to_pixels((data - lo) * (255.0 / (hi - lo)), 8)


def padded_side(height: int, width: int, M: int) -> int:
    """Smallest multiple of ``2**(M+2)`` that is at least ``max(height, width)``."""
    q = 2 ** (M + 2)
    return -(-max(height, width) // q) * q


def extend_symmetric(img, M: int) -> tuple[np.ndarray, CropRecord]:
    """Mirror-extend an image to a square the transform can take to depth ``M``.

    The extension reflects about the edge samples without repeating them.
    Padding is split evenly before and after along each axis; the returned
    :class:`CropRecord` undoes it.

    Examples
    --------
    >>> ext, rec = extend_symmetric(np.ones((500, 480)), 3)
    >>> ext.shape, (rec.top, rec.left)
    ((512, 512), (6, 16))
    """
    img = np.asarray(img, dtype=float)
    if img.ndim not in (2, 3):
        raise ValueError(f"expected an image array, got shape {img.shape}")
    H, W = img.shape[:2]
    if H < 8 or W < 8:
        raise ValueError(f"image {H}x{W} is too small; both sides must be at least 8")
    S = padded_side(H, W, M)
    top, left = (S - H) // 2, (S - W) // 2
    pad = [(top, S - H - top), (left, S - W - left)] + [(0, 0)] * (img.ndim - 2)
    ext = np.pad(img, pad, mode="reflect") if S != H or S != W else img.copy()
    return ext, CropRecord(H, W, top, left)


def psnr(ref, test, data_range: float | None = None) -> float:
    """Peak signal-to-noise ratio ``10 log10(MAX^2 / MSE)`` in dB.

    ``MAX`` is ``data_range`` if given, else the data range of ``ref``
    (``max - min``). A constant reference has no range; the joint range of
    both images is used instead. Identical inputs give ``inf``.
    """
    ref = np.asarray(ref, dtype=float)
    test = np.asarray(test, dtype=float)
    if ref.shape != test.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {test.shape}")
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0:
        return math.inf
    peak = data_range
    if peak is None:
        peak = float(ref.max() - ref.min())
        if peak == 0:
            peak = float(max(ref.max(), test.max()) - min(ref.min(), test.min()))
    return 10 * math.log10(peak ** 2 / mse)


@dataclass
class MetricsReport:
    """Quality figures of a processed image against a reference."""

    psnr: float
    max_abs_err: float
    per_level_energy: list = field(default_factory=list)
    psnr_input: float | None = None

    def to_dict(self) -> dict:
        def num(x):
            return "inf" if x is not None and math.isinf(x) else x
        return {"psnr": num(self.psnr), "maxAbsErr": self.max_abs_err,
                "perLevelEnergy": list(self.per_level_energy),
                "psnrInput": num(self.psnr_input)}
