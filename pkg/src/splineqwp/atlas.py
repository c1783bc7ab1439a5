"""Wavelet-packet waveforms, their 2D directional products and diagnostics.

Waveforms are impulse responses of the tree: the spectrum of packet
``(m, l)`` is the product of the first-level response of the requested kind
and the real responses of the deeper levels along the path from the root
to ``l``. The same waveform is obtained by synthesizing a unit coefficient,
see :func:`gen_waveform_synthesis`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev

from .filterbank import Kind, filter_responses, get_tables
from .wpt1d import CoeffTree1D, check_depth, level_cover, wpt_inverse

SIGNS = ("+", "-")
_KIND_NAMES = {Kind.REAL: "psi", Kind.COMPLEMENTARY: "phi",
               Kind.QPLUS: "qplus", Kind.QMINUS: "qminus"}


def _check_node(N: int, m: int, l: int) -> None:
    check_depth(N, m)
    if not 0 <= l < 2 ** m:
        raise ValueError(f"subband {l} outside 0..{2 ** m - 1} at level {m}")


def _path(m: int, l: int) -> list:
    """Filter indices ``mu_1..mu_m`` selecting subband ``l`` of level ``m``."""
    mus = []
    lam = 0
    for k in range(1, m + 1):
        rho = l >> (m - k)
        off = rho - 2 * lam
        mus.append(off if lam % 2 == 0 else 1 - off)
        lam = rho
    return mus


def packet_spectrum(p: int, N: int, m: int, l: int, kind=Kind.REAL) -> np.ndarray:
    """DFT of the level-``m`` packet in subband ``l``."""
    kind = Kind.parse(kind)
    _check_node(N, m, l)
    t = get_tables(p, N)
    n = np.arange(N)
    mus = _path(m, l)
    spec = np.array(filter_responses(t, kind, 1)[mus[0]], dtype=complex)
    real = filter_responses(t, Kind.REAL, 1)
    for k, mu in enumerate(mus[1:], start=1):
        spec *= real[mu][(2 ** k * n) % N]
    return spec


@dataclass
class Waveform:
    """One sampled 1D wavelet-packet waveform and its DFT."""

    p: int
    N: int
    m: int
    l: int
    kind: Kind
    samples: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False)

    @property
    def name(self) -> str:
        return _KIND_NAMES[self.kind]

    def norm(self) -> float:
        return float(np.linalg.norm(self.samples))


def gen_waveform(p: int, N: int, m: int, l: int, kind=Kind.REAL) -> Waveform:
    """Waveform of packet ``(m, l)`` built from the frequency responses.

    ``psi`` and ``phi`` samples are real (stored as complex), the
    quasi-analytic kinds are ``psi +/- 1j*phi``.

    Examples
    --------
    >>> w = gen_waveform(9, 64, 1, 0)
    >>> bool(abs(w.spectrum[0] - 2 ** 0.5) < 1e-12)
    True
    """
    kind = Kind.parse(kind)
    spec = packet_spectrum(p, N, m, l, kind)
    samples = np.fft.ifft(spec)
    if kind in (Kind.REAL, Kind.COMPLEMENTARY):
        samples = samples.real.astype(complex)
    return Waveform(p, N, m, l, kind, samples, spec)


def gen_waveform_synthesis(p: int, N: int, m: int, l: int, kind=Kind.REAL) -> np.ndarray:
    """Same waveform as :func:`gen_waveform`, by inverting a unit coefficient."""
    kind = Kind.parse(kind)
    _check_node(N, m, l)
    levels = [np.zeros((2 ** k, N // 2 ** k), dtype=complex) for k in range(1, m + 1)]
    levels[m - 1][l, 0] = 1.0
    tree = CoeffTree1D(p, N, m, kind, levels)
    return np.asarray(wpt_inverse(tree, level_cover(m)), dtype=complex)


# ---------------------------------------------------------------- 2D

@dataclass
class Waveform2D:
    """Real directional waveform ``Re(Psi_plus_j (x) Psi_sign_l)``.

    Array axis 0 (index ``k``) carries subband ``j``; axis 1 (index ``n``)
    carries subband ``l``. ``orientation`` is ``(nu0, kappa0)``.
    """

    p: int
    N: int
    m: int
    j: int
    l: int
    sign: str
    samples: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False)
    center: tuple = (0, 0)
    direction_class: int | None = None

    @property
    def orientation(self) -> tuple:
        kappa0, nu0 = self.center
        return (nu0, kappa0)


def _check_sign(sign: str) -> str:
    if sign not in SIGNS:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return sign


def gen_waveform2d(p: int, N: int, m: int, j: int, l: int, sign: str = "+") -> Waveform2D:
    """Directional waveform of dual-tree block ``(j, l)`` at level ``m``.

    ``+`` gives ``psi_j psi_l - phi_j phi_l``, ``-`` gives
    ``psi_j psi_l + phi_j phi_l``.
    """
    _check_sign(sign)
    _check_node(N, m, j)
    _check_node(N, m, l)
    col = gen_waveform(p, N, m, j, Kind.QPLUS).samples
    row = gen_waveform(p, N, m, l, Kind.QPLUS if sign == "+" else Kind.QMINUS).samples
    samples = np.outer(col, row).real
    w = Waveform2D(p, N, m, j, l, sign, samples, np.fft.fft2(samples))
    w.center = spectral_center(w)
    return w


def _quadrant_masks(N: int, sign: str):
    """Bins of the closed half-axes: ``[0, N/2]`` and, for ``-``, ``{0} u [N/2, N)``."""
    n = np.arange(N)
    pos = n <= N // 2
    neg = (n == 0) | (n >= N // 2)
    return pos, (pos if sign == "+" else neg)


def _centroid(weights: np.ndarray, bins: np.ndarray, N: int) -> float:
    total = weights.sum()
    if not total > 0:
        raise ValueError("waveform has no spectral energy in its quadrant")
    # unwrap bins above N/2 so the negative half-axis is contiguous
    signed = np.where(bins > N // 2, bins - N, bins)
    return float((weights * signed).sum() / total)


def spectral_center(w: Waveform2D) -> tuple:
    """Energy centroid ``(kappa0, nu0)`` of the waveform's spectrum.

    The centroid is taken over quadrant ``Q0`` (``+``) or ``Q1`` (``-``),
    rounded to the nearest bin and reported modulo ``N``.
    """
    N = w.N
    rows, cols = _quadrant_masks(N, w.sign)
    power = np.abs(w.spectrum[np.ix_(rows, cols)]) ** 2
    kbins = np.flatnonzero(rows)
    nbins = np.flatnonzero(cols)
    kappa = _centroid(power.sum(axis=1), kbins, N)
    nu = _centroid(power.sum(axis=0), nbins, N)
    return int(round(kappa)) % N, int(round(nu)) % N


def separable_center(p: int, N: int, m: int, j: int, l: int, sign: str = "+") -> tuple:
    """Unrounded ``(kappa0, nu0)`` from 1D spectra, without forming the 2D array.

    Valid because the quadrant power of a product waveform factors into
    the two 1D powers. ``nu0`` is signed (negative for ``-``).
    """
    _check_sign(sign)
    rows, cols = _quadrant_masks(N, sign)
    pj = np.abs(packet_spectrum(p, N, m, j, Kind.QPLUS)) ** 2
    pl = np.abs(packet_spectrum(p, N, m, l, Kind.QPLUS if sign == "+" else Kind.QMINUS)) ** 2
    return (_centroid(pj[rows], np.flatnonzero(rows), N),
            _centroid(pl[cols], np.flatnonzero(cols), N))


def orientation_angle(kappa0: float, nu0: float) -> float:
    """Angle of the spectral center, ``atan2(kappa0, nu0)`` with signed ``nu0``."""
    return math.atan2(kappa0, nu0)


def direction_census(p: int, N: int, m: int) -> dict:
    """Group the level-``m`` dual-tree waveforms by orientation.

    Blocks of one tree on a common diagonal, ``(j, l) ~ (j+1, l+1)``, start
    in the same class. Classes of the same tree whose mean orientation
    angles differ by less than one bin of arc at radius ``N/4`` (``4/N``
    radians) are then merged.

    Returns
    -------
    dict
        ``class id -> list of (j, l, sign)``, ids numbered by increasing
        angle.
    """
    if m < 1:
        raise ValueError("level must be at least 1")
    B = 2 ** m
    tol = 4.0 / N
    seeds = {}
    for sign in SIGNS:
        for j in range(B):
            for l in range(B):
                kappa, nu = separable_center(p, N, m, j, l, sign)
                seeds.setdefault((sign, j - l), []).append(
                    ((j, l, sign), orientation_angle(kappa, nu)))

    classes = []
    for sign in SIGNS:
        groups = sorted(
            ([member for member, _ in v], float(np.mean([a for _, a in v])))
            for (s, _), v in seeds.items() if s == sign
        )
        groups.sort(key=lambda g: g[1])
        merged = []
        for members, angle in groups:
            if merged and angle - merged[-1][1] < tol:
                prev_members, prev_angle = merged[-1]
                n0, n1 = len(prev_members), len(members)
                merged[-1] = (prev_members + members,
                              (prev_angle * n0 + angle * n1) / (n0 + n1))
            else:
                merged.append((members, angle))
        classes += merged
    classes.sort(key=lambda c: c[1])
    return {i: sorted(members) for i, (members, _) in enumerate(classes)}


def modulation_error(w: Waveform2D) -> float:
    """Relative L2 distance between ``w`` and a modulated real envelope.

    The one-quadrant complex waveform ``C`` (so ``w = Re(C)``) is demodulated
    by the carrier at the spectral center, measured from the spatial center
    ``(kc, nc)`` where the envelope peaks. With ``L`` the demodulated signal
    and ``theta`` its phase at the peak, the model is
    ``cos(2 pi (kappa0 (k - kc) + nu0 (n - nc)) / N + theta) * Re(L e^{-i theta})``.
    The model drops only ``Im(L e^{-i theta})``, so the error measures how far
    the envelope is from real.
    """
    N = w.N
    kappa0, nu0 = w.center
    rows, cols = _quadrant_masks(N, w.sign)
    one_sided = np.zeros_like(w.spectrum)
    one_sided[np.ix_(rows, cols)] = w.spectrum[np.ix_(rows, cols)]
    # corner bins are their own reflections, so both halves of Re land there
    corners = np.ix_([0, N // 2], [0, N // 2])
    one_sided[corners] /= 2
    C = 2 * np.fft.ifft2(one_sided)
    k = np.arange(N)[:, None]
    n = np.arange(N)[None, :]
    demod = C * np.exp(-2j * np.pi * (kappa0 * k + nu0 * n) / N)
    kc, nc = np.unravel_index(np.argmax(np.abs(demod)), demod.shape)
    dk = (k - kc + N // 2) % N - N // 2
    dn = (n - nc + N // 2) % N - N // 2
    phase = 2 * np.pi * (kappa0 * dk + nu0 * dn) / N
    L = C * np.exp(-1j * phase)
    theta = np.angle(L[kc, nc])
    model = np.cos(phase + theta) * np.real(L * np.exp(-1j * theta))
    return float(np.linalg.norm(model - w.samples) / np.linalg.norm(w.samples))


# ---------------------------------------------------------------- LDVM

@dataclass
class LdvmReport:
    """Outcome of :func:`ldvm_verify`.

    ``residuals[d]`` is the worst relative output for a degree-``d`` test
    polynomial; ``count`` is the number of leading degrees below ``tol``.
    """

    p: int
    N: int
    m: int
    l: int
    count: int
    expected: int
    window: tuple
    interior: tuple
    residuals: list

    @property
    def ok(self) -> bool:
        return self.count >= self.expected


def _support_radius(g: np.ndarray, tail: float) -> int:
    """Smallest ``R`` with ``sum_{|j| > R} |g[j]| <= tail * sum |g|`` (``g`` centered at 0)."""
    N = g.shape[0]
    a = np.abs(g)
    j = np.abs(np.where(np.arange(N) > N // 2, np.arange(N) - N, np.arange(N)))
    order = np.argsort(j, kind="stable")
    inside = np.cumsum(a[order])
    outside = a.sum() - inside
    dist = j[order]
    ok = outside <= tail * a.sum()
    return int(dist[np.argmax(ok)])


def ldvm_verify(p: int, N: int, m: int, l: int, tol: float = 1e-8,
                max_degree: int | None = None, tail: float = 1e-13,
                half_width: int | None = None, seed: int = 0) -> LdvmReport:
    """Count the local discrete vanishing moments of packet ``(m, l)``.

    The real packet is used as a filter on a signal equal to a sampled
    polynomial on a window and zero elsewhere. Outputs at interior points,
    whose filter footprint stays inside the window, must vanish. The
    residual at each point is ``|sum g s| / sum |g| |s|``.

    The window is sized from the packet itself: its half-length is the
    radius holding all but ``tail`` of the packet's absolute mass plus the
    interior half-width, unless ``half_width`` fixes it. Test polynomials are random Chebyshev series in
    the window coordinate, with a nonzero leading term.

    Raises
    ------
    ValueError
        For ``l = 0`` or when the packet is too wide to fit a window in one
        period.
    """
    _check_node(N, m, l)
    if l == 0:
        raise ValueError("vanishing moments are defined for l != 0 subbands only")
    r = (p + 1) // 2
    expected = 2 * r
    if max_degree is None:
        max_degree = expected + 2

    g = gen_waveform(p, N, m, l, Kind.REAL).samples.real
    shift = int(np.argmax(np.abs(g)))
    g = np.roll(g, -shift)
    R = _support_radius(g, tail)
    E = p + 2
    H = max(2 * (p + 2), R + E) if half_width is None else int(half_width)
    if H <= E:
        raise ValueError(f"window half-width {H} must exceed the interior half-width {E}")
    if 2 * H + 1 > N:
        raise ValueError(
            f"packet (m={m}, l={l}) needs a window of {2 * H + 1} samples; N={N} is too short")

    c = N // 2
    window = np.arange(c - H, c + H + 1)
    interior = np.arange(c - E, c + E + 1)
    # out[k] = sum_i g[(k - i) mod N] s[i], restricted to the window
    G = g[np.mod(interior[:, None] - window[None, :], N)]
    t = (window - c) / H
    rng = np.random.default_rng(seed)

    residuals = []
    for d in range(max_degree + 1):
        coef = rng.uniform(0.5, 1.0, d + 1) * rng.choice([-1.0, 1.0], d + 1)
        s = chebyshev.chebval(t, coef)
        out = np.abs(G @ s)
        scale = np.abs(G) @ np.abs(s)
        residuals.append(float(np.max(out / scale)))

    count = 0
    while count < len(residuals) and residuals[count] <= tol:
        count += 1
    return LdvmReport(p, N, m, l, count, expected,
                      (int(window[0]), int(window[-1])),
                      (int(interior[0]), int(interior[-1])), residuals)

