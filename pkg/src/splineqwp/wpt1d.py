"""Multi-level 1D wavelet-packet transforms and the periodic Hilbert transform.

The first level uses the filter family of the requested :class:`Kind`; every
deeper level uses the real spline filters, so the complementary and
quasi-analytic trees cost the same as the real one. All filtering happens on
spectra: one FFT in, one batched inverse FFT per stored level out.

Subbands are kept in frequency order. Splitting subband ``lam`` with filter
``mu`` yields child ``2*lam + mu`` when ``lam`` is even and
``2*lam + 1 - mu`` when ``lam`` is odd.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filterbank import Kind, filter_responses, get_tables, merge, split


def max_depth(N: int) -> int:
    """Deepest level leaving at least four samples per subband."""
    M = 0
    while N % 2 ** (M + 1) == 0 and N // 2 ** (M + 1) >= 4:
        M += 1
    return M


def check_depth(N: int, M: int) -> None:
    if int(M) != M or M < 1:
        raise ValueError(f"depth must be a positive integer, got {M!r}")
    if N % 2 ** M:
        raise ValueError(f"N={N} is not divisible by 2**{M}")
    if M > max_depth(N):
        raise ValueError(f"depth {M} too deep for N={N} (max {max_depth(N)})")


def child_index(lam: int, mu: int) -> int:
    return 2 * lam + (mu if lam % 2 == 0 else 1 - mu)


def gray_interleave(lo: np.ndarray, hi: np.ndarray, axis: int = 0) -> np.ndarray:
    """Stack the children of every parent band in frequency order.

    ``lo[lam]`` and ``hi[lam]`` are the two children of band ``lam`` along
    ``axis``; the result has twice as many bands.
    """
    lo = np.moveaxis(lo, axis, 0)
    hi = np.moveaxis(hi, axis, 0)
    B = lo.shape[0]
    odd = (np.arange(B) % 2 == 1).reshape((B,) + (1,) * (lo.ndim - 1))
    out = np.empty((2 * B,) + lo.shape[1:], dtype=np.result_type(lo, hi))
    out[0::2] = np.where(odd, hi, lo)
    out[1::2] = np.where(odd, lo, hi)
    return np.moveaxis(out, 0, axis)


def gray_deinterleave(bands: np.ndarray, axis: int = 0):
    """Inverse of :func:`gray_interleave`: returns ``(lo, hi)``."""
    bands = np.moveaxis(bands, axis, 0)
    even, odd_rows = bands[0::2], bands[1::2]
    B = even.shape[0]
    odd = (np.arange(B) % 2 == 1).reshape((B,) + (1,) * (bands.ndim - 1))
    lo = np.where(odd, odd_rows, even)
    hi = np.where(odd, even, odd_rows)
    return np.moveaxis(lo, 0, axis), np.moveaxis(hi, 0, axis)


def hilbert(x) -> np.ndarray:
    """Discrete periodic Hilbert transform of a real even-length signal.

    Multiplies the DFT by ``-1j`` on bins ``0 < n < N/2``, by ``+1j`` on
    ``N/2 < n < N`` and zeroes DC and Nyquist.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        raise ValueError("hilbert expects a real signal")
    N = x.shape[-1]
    if N % 2:
        raise ValueError(f"signal length {N} must be even")
    X = np.fft.fft(x, axis=-1)
    X[..., 0] = 0
    X[..., N // 2] = 0
    X[..., 1: N // 2] *= -1j
    X[..., N // 2 + 1:] *= 1j
    return np.fft.ifft(X, axis=-1).real


@dataclass(frozen=True)
class AnalyticSignal:
    x: np.ndarray
    h: np.ndarray

    @property
    def x_plus(self) -> np.ndarray:
        return self.x + 1j * self.h

    @property
    def x_minus(self) -> np.ndarray:
        return self.x - 1j * self.h


def analytic_signal(x) -> AnalyticSignal:
    x = np.asarray(x, dtype=float)
    return AnalyticSignal(x, hilbert(x))


@dataclass
class CoeffTree1D:
    """Coefficients of every level ``1..depth`` of a 1D transform.

    ``levels[m - 1]`` is a complex array of shape ``(2**m, N // 2**m)`` whose
    row ``rho`` is subband ``rho`` of level ``m``.
    """

    p: int
    N: int
    depth: int
    kind: Kind
    levels: list

    def subband(self, m: int, rho: int) -> np.ndarray:
        return self.levels[m - 1][rho]

    def copy(self) -> "CoeffTree1D":
        return CoeffTree1D(self.p, self.N, self.depth, self.kind,
                           [a.copy() for a in self.levels])

    def level_energy(self, m: int) -> float:
        return float(np.sum(np.abs(self.levels[m - 1]) ** 2))

    def conj(self) -> "CoeffTree1D":
        return CoeffTree1D(self.p, self.N, self.depth, self.kind,
                           [np.conj(a) for a in self.levels])


def forward_spectra(xh: np.ndarray, p: int, M: int, kind=Kind.REAL, axis: int = -1):
    """Spectral-domain forward transform along ``axis``.

    Returns a list of ``M`` arrays; level ``m`` has the subband axis
    inserted at position 0 and ``N / 2**m`` bins along ``axis``.
    """
    kind = Kind.parse(kind)
    xh = np.moveaxis(np.asarray(xh, dtype=complex), axis, -1)
    N = xh.shape[-1]
    t = get_tables(p, N)
    f0, f1 = filter_responses(t, kind, 1)
    lo, hi = split(xh, f0, f1)
    cur = np.stack([lo, hi])
    out = [cur]
    for m in range(1, M):
        h0, h1 = filter_responses(t, Kind.REAL, 2 ** m)
        lo, hi = split(cur, h0, h1)
        cur = gray_interleave(lo, hi)
        out.append(cur)
    return [np.moveaxis(c, -1, axis if axis < 0 else axis + 1) for c in out]


def wpt_forward(x, p: int, M: int, kind=Kind.REAL) -> CoeffTree1D:
    """Decompose a real signal down to level ``M``.

    Parameters
    ----------
    x : array_like
        Real signal of length ``N``; ``2**M`` must divide ``N``.
    p : int
        Spline order.
    M : int
        Decomposition depth.
    kind : Kind or str
        ``real`` (psi packets), ``complementary`` (phi packets), ``qplus``
        or ``qminus`` (quasi-analytic packets).

    Returns
    -------
    CoeffTree1D
        For ``qplus`` the coefficients are ``y - 1j*c`` where ``y`` and ``c``
        are the real and complementary coefficients; ``qminus`` gives the
        conjugate.
    """
    kind = Kind.parse(kind)
    x = np.asarray(x)
    if np.iscomplexobj(x):
        raise ValueError("wpt_forward expects a real signal")
    if x.ndim != 1:
        raise ValueError("wpt_forward expects a 1D signal")
    N = x.shape[0]
    check_depth(N, M)
    spectra = forward_spectra(np.fft.fft(x), p, M, kind)
    levels = [np.fft.ifft(s, axis=-1) for s in spectra]
    return CoeffTree1D(p, N, M, kind, levels)


def check_cover(selection, M: int) -> list:
    """Validate that ``selection`` tiles the frequency axis exactly once.

    Nodes are ``(m, rho)`` with ``1 <= m <= M``. Returns the nodes sorted.
    """
    nodes = sorted({(int(m), int(r)) for m, r in selection})
    if not nodes:
        raise ValueError("empty selection")
    count = np.zeros(2 ** M, dtype=int)
    for m, r in nodes:
        if not 1 <= m <= M or not 0 <= r < 2 ** m:
            raise ValueError(f"node {(m, r)} outside the tree of depth {M}")
        w = 2 ** (M - m)
        count[r * w:(r + 1) * w] += 1
    if np.any(count != 1):
        raise ValueError("selection is not a disjoint cover of the frequency axis")
    return nodes


def level_cover(m: int) -> list:
    return [(m, r) for r in range(2 ** m)]


def wavelet_cover(M: int) -> list:
    """Wavelet-basis staircase: high band at each level plus the deepest low band."""
    return [(m, 1) for m in range(1, M + 1)] + [(M, 0)]


def inverse_spectra(get_leaf, N: int, p: int, kind, selection, M: int):
    """Rebuild the level-0 spectrum from the spectra of selected nodes.

    ``get_leaf(m, rho)`` returns the spectrum of node ``(m, rho)``; the bins
    sit on the last axis.
    """
    kind = Kind.parse(kind)
    t = get_tables(p, N)
    chosen = set(check_cover(selection, M))

    def rebuild(m, lam):
        if (m, lam) in chosen:
            return get_leaf(m, lam)
        a = rebuild(m + 1, 2 * lam)
        b = rebuild(m + 1, 2 * lam + 1)
        lo, hi = (a, b) if lam % 2 == 0 else (b, a)
        h0, h1 = filter_responses(t, Kind.REAL, 2 ** m)
        return merge(lo, hi, h0, h1)

    lo = rebuild(1, 0)
    hi = rebuild(1, 1)
    f0, f1 = filter_responses(t, kind, 1)
    return merge(lo, hi, f0, f1)


def wpt_inverse(tree: CoeffTree1D, selection=None) -> np.ndarray:
    """Reconstruct from the nodes in ``selection`` (default: all of level ``depth``).

    Real and complementary trees return the real signal. Quasi-analytic trees
    return ``2 * (x +/- 1j * hilbert(x))``; ``x`` is half the real part.
    """
    if selection is None:
        selection = level_cover(tree.depth)
    xh = inverse_spectra(
        lambda m, r: np.fft.fft(tree.levels[m - 1][r]),
        tree.N, tree.p, tree.kind, selection, tree.depth,
    )
    x = np.fft.ifft(xh)
    if tree.kind in (Kind.REAL, Kind.COMPLEMENTARY):
        return x.real
    return x


def frame_reconstruct(ytree: CoeffTree1D, ctree: CoeffTree1D, m: int) -> np.ndarray:
    """Tight-frame reconstruction from the real and complementary trees at level ``m``.

    ``x = (sum of psi expansions + sum of phi expansions) / 2``.
    """
    if ytree.kind is not Kind.REAL or ctree.kind is not Kind.COMPLEMENTARY:
        raise ValueError("expected a real tree and a complementary tree")
    if (ytree.p, ytree.N) != (ctree.p, ctree.N):
        raise ValueError("trees come from different (p, N)")
    if m > min(ytree.depth, ctree.depth):
        raise ValueError(f"level {m} not present in both trees")
    cover = level_cover(m)
    return 0.5 * (wpt_inverse(ytree, cover) + wpt_inverse(ctree, cover))
