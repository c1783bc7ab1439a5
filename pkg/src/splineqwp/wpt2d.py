"""Dual-tree 2D quasi-analytic wavelet-packet transform.

Two coefficient trees are computed from one real image ``X``:

* ``plus``: first level uses the quasi-analytic ``+`` bank on rows and on
  columns;
* ``minus``: ``-`` bank on rows, ``+`` bank on columns.

Deeper levels apply the real spline bank along both axes. Inverting each
tree gives the complex images ``X_plus`` and ``X_minus``;
``X = Re(X_plus + X_minus) / 8``.

Blocks at level ``m`` are indexed ``(j, l)``: ``j`` is the column-direction
(vertical, first array axis) subband and ``l`` the row-direction subband.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .filterbank import Kind, filter_responses, get_tables, merge, split
from .wpt1d import check_depth, gray_interleave

#: ``X = Re(X_plus + X_minus) / RECON_DIVISOR``
RECON_DIVISOR = 8.0

TREES = ("plus", "minus")
_ROW_KIND = {"plus": Kind.QPLUS, "minus": Kind.QMINUS}


@dataclass
class QwpCoeffs2D:
    """Both dual-tree coefficient sets for every level ``1..depth``.

    ``trees[name][m - 1]`` is a complex array of shape
    ``(2**m, 2**m, N // 2**m, N // 2**m)`` holding block ``(j, l)`` at
    ``[j, l]``. A tree may be absent when only one was requested.
    """

    p: int
    N: int
    depth: int
    trees: dict = field(default_factory=dict)

    @property
    def plus(self):
        return self.trees.get("plus")

    @property
    def minus(self):
        return self.trees.get("minus")

    def block(self, tree: str, m: int, j: int, l: int) -> np.ndarray:
        return self.trees[tree][m - 1][j, l]

    def copy(self) -> "QwpCoeffs2D":
        return QwpCoeffs2D(self.p, self.N, self.depth,
                           {k: [a.copy() for a in v] for k, v in self.trees.items()})

    def level_energy(self, m: int, tree: str | None = None) -> float:
        names = [tree] if tree else list(self.trees)
        return float(sum(np.sum(np.abs(self.trees[t][m - 1]) ** 2) for t in names))


def _check_image(X) -> np.ndarray:
    X = np.asarray(X)
    if np.iscomplexobj(X):
        raise ValueError("expected a real image")
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square 2D image, got shape {X.shape}")
    return X.astype(float)


def _forward_tree(Xh: np.ndarray, p: int, M: int, row_kind: Kind) -> list:
    N = Xh.shape[0]
    t = get_tables(p, N)
    r0, r1 = filter_responses(t, row_kind, 1)
    c0, c1 = filter_responses(t, Kind.QPLUS, 1)
    rlo, rhi = split(Xh, r0, r1, axis=-1)
    rows = np.stack([rlo, rhi])                       # (l, k, n)
    clo, chi = split(rows, c0, c1, axis=-2)
    cur = np.stack([clo, chi])                        # (j, l, k, n)
    out = [cur]
    for m in range(1, M):
        h0, h1 = filter_responses(t, Kind.REAL, 2 ** m)
        lo, hi = split(cur, h0, h1, axis=-1)
        cur = gray_interleave(lo, hi, axis=1)
        lo, hi = split(cur, h0, h1, axis=-2)
        cur = gray_interleave(lo, hi, axis=0)
        out.append(cur)
    return out


def qwpt2_forward(X, p: int, M: int, trees=TREES) -> QwpCoeffs2D:
    """Dual-tree forward transform of a square real image down to level ``M``."""
    X = _check_image(X)
    N = X.shape[0]
    check_depth(N, M)
    Xh = np.fft.fft2(X)
    result = QwpCoeffs2D(p, N, M)
    for name in trees:
        if name not in _ROW_KIND:
            raise ValueError(f"unknown tree {name!r}")
        spectra = _forward_tree(Xh, p, M, _ROW_KIND[name])
        result.trees[name] = [np.fft.ifft2(s, axes=(-2, -1)) for s in spectra]
    return result


def check_cover2d(selection, M: int) -> list:
    """Validate a quadtree cover given as ``(m, j, l)`` nodes."""
    nodes = sorted({(int(m), int(j), int(l)) for m, j, l in selection})
    if not nodes:
        raise ValueError("empty selection")
    count = np.zeros((2 ** M, 2 ** M), dtype=int)
    for m, j, l in nodes:
        if not 1 <= m <= M or not (0 <= j < 2 ** m and 0 <= l < 2 ** m):
            raise ValueError(f"node {(m, j, l)} outside the tree of depth {M}")
        w = 2 ** (M - m)
        count[j * w:(j + 1) * w, l * w:(l + 1) * w] += 1
    if np.any(count != 1):
        raise ValueError("selection is not a disjoint cover of the frequency plane")
    return nodes


def level_cover2d(m: int) -> list:
    return [(m, j, l) for j in range(2 ** m) for l in range(2 ** m)]


def wavelet_cover2d(M: int) -> list:
    """2D wavelet staircase: the three detail blocks of each level plus the deepest low block."""
    nodes = []
    for m in range(1, M + 1):
        nodes += [(m, 0, 1), (m, 1, 0), (m, 1, 1)]
    return nodes + [(M, 0, 0)]


def _inverse_tree(get_block, N: int, p: int, M: int, row_kind: Kind, selection) -> np.ndarray:
    t = get_tables(p, N)
    chosen = set(check_cover2d(selection, M))

    def pick(parent, child_pair):
        a, b = child_pair
        return (a, b) if parent % 2 == 0 else (b, a)

    def rebuild(m, j, l):
        if (m, j, l) in chosen:
            return get_block(m, j, l)
        h0, h1 = filter_responses(t, Kind.REAL, 2 ** m)
        cols = []
        for rho in (2 * j, 2 * j + 1):
            lo, hi = pick(l, (rebuild(m + 1, rho, 2 * l), rebuild(m + 1, rho, 2 * l + 1)))
            cols.append(merge(lo, hi, h0, h1, axis=-1))
        lo, hi = pick(j, cols)
        return merge(lo, hi, h0, h1, axis=-2)

    r0, r1 = filter_responses(t, row_kind, 1)
    c0, c1 = filter_responses(t, Kind.QPLUS, 1)
    rows = []
    for l in (0, 1):
        rows.append(merge(rebuild(1, 0, l), rebuild(1, 1, l), c0, c1, axis=-2))
    return merge(rows[0], rows[1], r0, r1, axis=-1)


@dataclass
class Reconstruction2D:
    """Output of :func:`qwpt2_inverse`."""

    image: np.ndarray
    x_plus: np.ndarray | None
    x_minus: np.ndarray | None


def tree_signal(coeffs: QwpCoeffs2D, tree: str, selection=None) -> np.ndarray:
    """Complex image ``X_plus`` or ``X_minus`` synthesized from one tree."""
    if tree not in coeffs.trees:
        raise ValueError(f"tree {tree!r} not present")
    if selection is None:
        selection = level_cover2d(coeffs.depth)
    levels = coeffs.trees[tree]
    Xh = _inverse_tree(
        lambda m, j, l: np.fft.fft2(levels[m - 1][j, l]),
        coeffs.N, coeffs.p, coeffs.depth, _ROW_KIND[tree], selection,
    )
    return np.fft.ifft2(Xh)


def qwpt2_inverse(coeffs: QwpCoeffs2D, selection=None) -> Reconstruction2D:
    """Reconstruct the image and the two complex intermediates.

    Parameters
    ----------
    coeffs : QwpCoeffs2D
    selection : list or dict, optional
        Quadtree cover of ``(m, j, l)`` nodes used for both trees, or a dict
        ``{"plus": cover, "minus": cover}``. Default: all blocks of the
        deepest level.

    Returns
    -------
    Reconstruction2D
        ``image = Re(x_plus + x_minus) / 8`` when both trees are present.
        With a single tree ``image = Re(x_tree) / 8``, that tree's share of
        the image: its spectrum holds one quadrant pair.
    """
    if not isinstance(selection, dict):
        selection = {name: selection for name in TREES}
    sig = {name: tree_signal(coeffs, name, selection.get(name))
           for name in TREES if name in coeffs.trees}
    if not sig:
        raise ValueError("no coefficient trees to reconstruct from")
    image = sum(v.real for v in sig.values()) / RECON_DIVISOR
    return Reconstruction2D(image, sig.get("plus"), sig.get("minus"))


def threshold_coeffs(coeffs: QwpCoeffs2D, rule: str, tau: float, levels=None,
                     keep_lowpass: bool = True) -> QwpCoeffs2D:
    """Hard or soft thresholding of complex coefficient magnitudes.

    ``hard``: ``z * (|z| > tau)``; ``soft``: ``z * max(0, 1 - tau/|z|)``.
    Applied identically to both trees on the given ``levels`` (default all).
    With ``keep_lowpass`` the ``(0, 0)`` block of each level is left alone.
    """
    if not tau >= 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    if rule not in ("hard", "soft"):
        raise ValueError(f"unknown threshold rule {rule!r}")
    out = coeffs.copy()
    levels = range(1, coeffs.depth + 1) if levels is None else levels
    for name, lv in out.trees.items():
        for m in levels:
            z = lv[m - 1]
            keep = z[0, 0].copy()
            mag = np.abs(z)
            if rule == "hard":
                z *= mag > tau
            else:
                with np.errstate(divide="ignore", invalid="ignore"):
                    gain = np.where(mag > tau, 1.0 - tau / mag, 0.0)
                z *= gain
            if keep_lowpass:
                z[0, 0] = keep
    return out
