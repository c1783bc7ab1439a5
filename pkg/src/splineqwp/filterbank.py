"""Two-channel p-filter banks realized in the DFT domain.

A one-level split takes the DFT ``X`` of a length-``L`` sequence and returns
the DFTs of the two length-``L/2`` coefficient sequences

    Y_mu[n] = 1/2 * (X[n] conj(h_mu[n]) + X[n + L/2] conj(h_mu[n + L/2])),

and the merge inverts it with ``X[n] = h_0[n] Y_0[n] + h_1[n] Y_1[n]``. In
matrix form the analysis applies ``1/2 * conj(A[n])`` and the synthesis
applies ``A[n]^T`` where ``A[n]`` is the 2x2 modulation matrix whose rows are
the two filter responses at bins ``n`` and ``n + L/2``.

Four filter families share this machinery: the real spline wavelet packets
(``beta``/``alpha``), their complementary partners, and the two
quasi-analytic combinations ``real +/- 1j * complementary``. Levels below the
first always use the real family, subsampled in frequency by ``2**(m-1)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .splines import SplineTables, build_tables


class Kind(enum.IntEnum):
    REAL = 0
    COMPLEMENTARY = 1
    QPLUS = 2
    QMINUS = 3

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, Kind):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        aliases = {
            "real": cls.REAL, "y": cls.REAL, "psi": cls.REAL,
            "complementary": cls.COMPLEMENTARY, "c": cls.COMPLEMENTARY,
            "phi": cls.COMPLEMENTARY,
            "qplus": cls.QPLUS, "plus": cls.QPLUS, "+": cls.QPLUS,
            "qminus": cls.QMINUS, "minus": cls.QMINUS, "-": cls.QMINUS,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown transform kind {value!r}") from None


@lru_cache(maxsize=32)
def get_tables(p: int, N: int) -> SplineTables:
    """Cached :func:`build_tables`; tables are immutable."""
    return build_tables(p, N)


def complementary_responses(tables: SplineTables) -> tuple[np.ndarray, np.ndarray]:
    """DFTs of the first-level complementary packets.

    Hilbert transform of ``beta``/``alpha`` with the DC value of the low-pass
    and the Nyquist value of the high-pass restored at their own bins.
    """
    N = tables.N
    n = np.arange(N)
    sign = np.zeros(N)
    sign[(n > 0) & (n < N // 2)] = -1.0
    sign[n > N // 2] = 1.0
    g0 = 1j * sign * tables.beta
    g1 = 1j * sign * tables.alpha
    g0[0] = tables.beta[0]
    g1[N // 2] = tables.alpha[N // 2]
    return g0, g1


@lru_cache(maxsize=64)
def _first_level(p: int, N: int, kind: Kind) -> tuple[np.ndarray, np.ndarray]:
    t = get_tables(p, N)
    h0 = t.beta.astype(complex)
    h1 = t.alpha.astype(complex)
    if kind is Kind.REAL:
        f0, f1 = h0, h1
    else:
        g0, g1 = complementary_responses(t)
        if kind is Kind.COMPLEMENTARY:
            f0, f1 = g0, g1
        elif kind is Kind.QPLUS:
            f0, f1 = h0 + 1j * g0, h1 + 1j * g1
        else:
            f0, f1 = h0 - 1j * g0, h1 - 1j * g1
    f0 = np.array(f0, dtype=complex)
    f1 = np.array(f1, dtype=complex)
    f0.setflags(write=False)
    f1.setflags(write=False)
    return f0, f1


def filter_responses(tables: SplineTables, kind=Kind.REAL, stride: int = 1):
    """Frequency responses ``(h0, h1)`` of one filter-bank stage.

    For ``stride = s`` the responses are ``f[s*n mod N]`` on ``N // s`` bins,
    i.e. the filters of decomposition level ``log2(s) + 1``.
    """
    kind = Kind.parse(kind)
    N = tables.N
    if stride < 1 or N % stride:
        raise ValueError(f"stride {stride} does not divide N={N}")
    f0, f1 = _first_level(tables.p, N, kind)
    if stride == 1:
        return f0, f1
    return f0[::stride], f1[::stride]


@dataclass(frozen=True)
class HalfBandPair:
    """DFTs of the low- and high-band coefficient sequences of one split."""

    lo: np.ndarray
    hi: np.ndarray


class ModMatSet:
    """Modulation matrices of one filter family.

    Parameters
    ----------
    tables : SplineTables
    kind : Kind or str
    """

    def __init__(self, tables: SplineTables, kind=Kind.REAL):
        self.tables = tables
        self.kind = Kind.parse(kind)

    def __repr__(self):
        return f"ModMatSet(p={self.tables.p}, N={self.tables.N}, kind={self.kind.name})"

    def analysis(self, n, stride: int = 1) -> np.ndarray:
        """Analysis matrices ``A[n]``, shape ``(..., 2, 2)``.

        Row ``mu`` holds filter ``mu`` at bins ``(s n, s n + N/2)``. The split
        applies ``1/2 * conj(A[n])``.
        """
        N = self.tables.N
        f0, f1 = _first_level(self.tables.p, N, self.kind)
        n = np.asarray(n)
        i0 = np.mod(stride * n, N)
        i1 = np.mod(stride * n + N // 2, N)
        A = np.empty(n.shape + (2, 2), dtype=complex)
        A[..., 0, 0] = f0[i0]
        A[..., 0, 1] = f0[i1]
        A[..., 1, 0] = f1[i0]
        A[..., 1, 1] = f1[i1]
        return A

    def synthesis(self, n, stride: int = 1) -> np.ndarray:
        """Synthesis matrices, the transposes of :meth:`analysis`."""
        return np.swapaxes(self.analysis(n, stride), -1, -2)


def modmat(tables: SplineTables, kind, n, stride: int = 1):
    """Analysis and synthesis modulation matrices at bin(s) ``n``."""
    mm = ModMatSet(tables, kind)
    return mm.analysis(n, stride), mm.synthesis(n, stride)


def split(xh: np.ndarray, h0: np.ndarray, h1: np.ndarray, axis: int = -1):
    """One-level analysis along ``axis`` of spectra ``xh``.

    ``h0`` and ``h1`` must have the length of ``xh`` along ``axis``.
    """
    xh = np.moveaxis(xh, axis, -1)
    L = xh.shape[-1]
    if L % 2:
        raise ValueError(f"cannot split odd length {L}")
    if h0.shape[-1] != L:
        raise ValueError(f"filter length {h0.shape[-1]} does not match signal length {L}")
    a, b = xh[..., : L // 2], xh[..., L // 2:]
    c0, c1 = np.conj(h0), np.conj(h1)
    lo = 0.5 * (a * c0[: L // 2] + b * c0[L // 2:])
    hi = 0.5 * (a * c1[: L // 2] + b * c1[L // 2:])
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def merge(lo: np.ndarray, hi: np.ndarray, h0: np.ndarray, h1: np.ndarray, axis: int = -1):
    """Inverse of :func:`split`."""
    lo = np.moveaxis(lo, axis, -1)
    hi = np.moveaxis(hi, axis, -1)
    if lo.shape != hi.shape:
        raise ValueError(f"band shapes differ: {lo.shape} vs {hi.shape}")
    if h0.shape[-1] != 2 * lo.shape[-1]:
        raise ValueError("filter length must be twice the band length")
    lo2 = np.concatenate([lo, lo], axis=-1)
    hi2 = np.concatenate([hi, hi], axis=-1)
    out = lo2 * h0 + hi2 * h1
    return np.moveaxis(out, -1, axis)


def _check_stride(mm: ModMatSet, L: int, stride: int):
    if stride * L != mm.tables.N:
        raise ValueError(
            f"stride {stride} with length {L} does not match N={mm.tables.N}"
        )


def analyze_one_level(x_hat, mm: ModMatSet, stride: int = 1) -> HalfBandPair:
    """Split the spectrum ``x_hat`` (length ``L = N / stride``) into two bands.

    Examples
    --------
    >>> t = get_tables(3, 16)
    >>> pair = analyze_one_level(np.fft.fft(np.ones(16)), ModMatSet(t))
    >>> bool(np.allclose(pair.hi, 0))
    True
    """
    x_hat = np.asarray(x_hat, dtype=complex)
    L = x_hat.shape[-1]
    if L % 2:
        raise ValueError(f"odd length {L}")
    _check_stride(mm, L, stride)
    h0, h1 = filter_responses(mm.tables, mm.kind, stride)
    lo, hi = split(x_hat, h0, h1)
    return HalfBandPair(lo, hi)


def synthesize_one_level(pair: HalfBandPair, mm: ModMatSet, stride: int = 1) -> np.ndarray:
    """Merge two band spectra back into one spectrum of length ``2 * len(lo)``."""
    lo = np.asarray(pair.lo, dtype=complex)
    hi = np.asarray(pair.hi, dtype=complex)
    if lo.shape != hi.shape:
        raise ValueError(f"mismatched band lengths {lo.shape} and {hi.shape}")
    _check_stride(mm, 2 * lo.shape[-1], stride)
    h0, h1 = filter_responses(mm.tables, mm.kind, stride)
    return merge(lo, hi, h0, h1)
