"""Binary coefficient containers.

All integers and floats are little-endian. Coefficients are complex128,
stored as interleaved ``(re, im)`` float64 pairs, so a read-back is
bit-identical to what was written.

QWP1 (one 1D tree)::

    offset size  field
    0      4     magic b"QWP1"
    4      4     u32 format version (1)
    8      4     u32 spline order p
    12     8     u64 signal length N
    20     4     u32 depth M
    24     1     u8  kind (0 real, 1 complementary, 2 qplus, 3 qminus)
    25     ...   level 1..M, each a (2**m, N/2**m) row-major complex array

QWP2 (2D dual tree, one or more image channels)::

    offset size  field
    0      4     magic b"QWP2"
    4      4     u32 format version (1)
    8      4     u32 spline order p
    12     8     u64 square side N
    20     4     u32 depth M
    24     8     f64 reconstruction divisor (8.0)
    32     4     u32 channel count C
    36     1     u8  tree count T (1 or 2)
    37     T     tree tags, ASCII b"+" or b"-"
    37+T   4     u32 original height H
    41+T   4     u32 original width W
    45+T   4     u32 top offset of the original inside the square
    49+T   4     u32 left offset
    53+T   1     u8  sample bit depth of the source image (0 if unknown)
    54+T   ...   for each channel, for each tree, level 1..M, each a
                 (2**m, 2**m, N/2**m, N/2**m) array indexed (j, l, k, n)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .filterbank import Kind
from .wpt1d import CoeffTree1D
from .wpt2d import RECON_DIVISOR, QwpCoeffs2D

VERSION = 1
_CDT = np.dtype("<c16")
_HEAD1 = struct.Struct("<4sIIQIB")
_HEAD2 = struct.Struct("<4sIIQIdIB")
_TAIL2 = struct.Struct("<IIIIB")
_TAG = {"plus": b"+", "minus": b"-"}
_NAME = {v: k for k, v in _TAG.items()}


class ContainerError(OSError):
    """Malformed or truncated coefficient container."""


@dataclass
class CropRecord:
    """Where the original image sits inside the extended square."""

    height: int
    width: int
    top: int = 0
    left: int = 0

    def crop(self, img: np.ndarray) -> np.ndarray:
        return img[self.top:self.top + self.height, self.left:self.left + self.width]


def _read_levels(buf: memoryview, pos: int, shapes) -> tuple[list, int]:
    out = []
    for shape in shapes:
        count = int(np.prod(shape))
        nbytes = count * _CDT.itemsize
        if pos + nbytes > len(buf):
            raise ContainerError("container is truncated")
        arr = np.frombuffer(buf, dtype=_CDT, count=count, offset=pos).reshape(shape)
        out.append(arr.astype(complex))
        pos += nbytes
    return out, pos


def _check_magic(buf: bytes, magic: bytes) -> None:
    if len(buf) < 4 or buf[:4] != magic:
        raise ContainerError(f"not a {magic.decode()} container")


def dumps_qwp1(tree: CoeffTree1D) -> bytes:
    parts = [_HEAD1.pack(b"QWP1", VERSION, tree.p, tree.N, tree.depth, int(tree.kind))]
    parts += [np.ascontiguousarray(a, dtype=_CDT).tobytes() for a in tree.levels]
    return b"".join(parts)


def loads_qwp1(buf: bytes) -> CoeffTree1D:
    _check_magic(buf, b"QWP1")
    if len(buf) < _HEAD1.size:
        raise ContainerError("container header is truncated")
    _, version, p, N, M, kind = _HEAD1.unpack_from(buf)
    if version != VERSION:
        raise ContainerError(f"unsupported QWP1 version {version}")
    try:
        kind = Kind(kind)
    except ValueError:
        raise ContainerError(f"unknown kind code {kind}") from None
    shapes = [(2 ** m, N // 2 ** m) for m in range(1, M + 1)]
    levels, pos = _read_levels(memoryview(buf), _HEAD1.size, shapes)
    if pos != len(buf):
        raise ContainerError("trailing bytes after the last level")
    return CoeffTree1D(p, N, M, kind, levels)


@dataclass
class Container2D:
    """Contents of a QWP2 file: one coefficient set per image channel."""

    channels: list
    crop: CropRecord
    bit_depth: int = 0

    @property
    def p(self) -> int:
        return self.channels[0].p

    @property
    def N(self) -> int:
        return self.channels[0].N

    @property
    def depth(self) -> int:
        return self.channels[0].depth


def dumps_qwp2(data: Container2D) -> bytes:
    first = data.channels[0]
    names = list(first.trees)
    for c in data.channels:
        if (c.p, c.N, c.depth, list(c.trees)) != (first.p, first.N, first.depth, names):
            raise ValueError("all channels must share p, N, depth and trees")
    parts = [
        _HEAD2.pack(b"QWP2", VERSION, first.p, first.N, first.depth, RECON_DIVISOR,
                    len(data.channels), len(names)),
        b"".join(_TAG[n] for n in names),
        _TAIL2.pack(data.crop.height, data.crop.width, data.crop.top, data.crop.left,
                    data.bit_depth),
    ]
    for c in data.channels:
        for n in names:
            parts += [np.ascontiguousarray(a, dtype=_CDT).tobytes() for a in c.trees[n]]
    return b"".join(parts)


def loads_qwp2(buf: bytes) -> Container2D:
    _check_magic(buf, b"QWP2")
    if len(buf) < _HEAD2.size:
        raise ContainerError("container header is truncated")
    _, version, p, N, M, divisor, C, T = _HEAD2.unpack_from(buf)
    if version != VERSION:
        raise ContainerError(f"unsupported QWP2 version {version}")
    if divisor != RECON_DIVISOR:
        raise ContainerError(f"unexpected reconstruction divisor {divisor}")
    pos = _HEAD2.size
    tags = bytes(buf[pos:pos + T])
    pos += T
    try:
        names = [_NAME[bytes([t])] for t in tags]
    except KeyError:
        raise ContainerError(f"bad tree tags {tags!r}") from None
    if len(buf) < pos + _TAIL2.size:
        raise ContainerError("container header is truncated")
    H, W, top, left, bits = _TAIL2.unpack_from(buf, pos)
    pos += _TAIL2.size
    shapes = [(2 ** m, 2 ** m, N // 2 ** m, N // 2 ** m) for m in range(1, M + 1)]
    view = memoryview(buf)
    channels = []
    for _ in range(C):
        coeffs = QwpCoeffs2D(p, N, M)
        for n in names:
            coeffs.trees[n], pos = _read_levels(view, pos, shapes)
        channels.append(coeffs)
    if pos != len(buf):
        raise ContainerError("trailing bytes after the last level")
    return Container2D(channels, CropRecord(H, W, top, left), bits)


def save_qwp1(path, tree: CoeffTree1D) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps_qwp1(tree))


def load_qwp1(path) -> CoeffTree1D:
    with open(path, "rb") as fh:
        return loads_qwp1(fh.read())


def save_qwp2(path, data: Container2D) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps_qwp2(data))


def load_qwp2(path) -> Container2D:
    with open(path, "rb") as fh:
        return loads_qwp2(fh.read())
