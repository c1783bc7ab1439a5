"""Polynomial B-splines and the frequency-domain sequences derived from them.

Every filter in the package is parameterized by one :class:`SplineTables`
instance, which holds, for a spline order ``p`` and period ``N``:

``u``, ``v``
    DFTs of the B-spline sampled at the integers and at the half-integers.
``bhat1``
    DFT of the span-two discrete-time B-spline ``b^p(k/2)/2``.
``upsilon``
    Normalizer ``(u[2n]^2 + v[2n]^2) / 4``.
``beta``, ``alpha``
    Frequency responses of the first-level low- and high-pass filters.

DFT convention throughout: ``X[n] = sum_k x[k] exp(-2j*pi*k*n/N)``, which is
what :func:`numpy.fft.fft` computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

P_MIN = 2
P_MAX = 20

# Orders above this are evaluated in exact rational arithmetic; the
# alternating binomial sum loses too many digits in float64.
_EXACT_ABOVE = 12


def check_order(p: int) -> int:
    if isinstance(p, bool) or int(p) != p:
        raise ValueError(f"spline order must be an integer, got {p!r}")
    p = int(p)
    if not P_MIN <= p <= P_MAX:
        raise ValueError(f"spline order p={p} outside [{P_MIN}, {P_MAX}]")
    return p


def _bspline_exact(p: int, t: float) -> float:
    # Fraction(float) is exact, so the only rounding is the final conversion.
    t = Fraction(t)
    half = Fraction(p, 2)
    if not -half < t < half:
        return 0.0
    acc = Fraction(0)
    for k in range(p + 1):
        s = t + half - k
        if s > 0:
            acc += (-1) ** k * math.comb(p, k) * s ** (p - 1)
    return float(acc / math.factorial(p - 1))


def eval_bspline(p: int, t):
    """Centered B-spline of order ``p`` evaluated at ``t``.

    Uses the truncated-power representation. The result is exactly zero
    outside the open support ``(-p/2, p/2)``.

    Parameters
    ----------
    p : int
        Spline order, ``2 <= p <= 20`` (degree ``p - 1``).
    t : float or array_like
        Evaluation points.

    Returns
    -------
    float or ndarray
        ``b^p(t)``, same shape as ``t``.
    """
    p = check_order(p)
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    # symmetric: evaluating at -|t| keeps the active truncated powers few
    ta = -np.abs(t_arr)
    if p > _EXACT_ABOVE:
        out = np.array([_bspline_exact(p, float(x)) for x in ta.ravel()])
        out = out.reshape(ta.shape)
    else:
        out = np.zeros_like(ta)
        for k in range(p + 1):
            s = np.maximum(ta + p / 2 - k, 0.0)
            out += (-1) ** k * math.comb(p, k) * s ** (p - 1)
        out /= math.factorial(p - 1)
        out[np.abs(t_arr) >= p / 2] = 0.0
    return float(out[0]) if scalar else out


def _integer_samples(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Nonnegative integer points inside the support and b^p there."""
    k = np.arange(0, (p + 1) // 2 + 1, dtype=float)
    k = k[k < p / 2]
    return k, np.array([_bspline_exact(p, x) for x in k])


def _half_integer_samples(p: int) -> tuple[np.ndarray, np.ndarray]:
    t = np.arange(0, p // 2 + 1, dtype=float) + 0.5
    t = t[t < p / 2]
    return t, np.array([_bspline_exact(p, x) for x in t])


def spline_u(p: int, N: int, n) -> np.ndarray:
    """``u^p[n] = sum_k b^p(k) w^{-kn}`` (N-periodic, real)."""
    k, b = _integer_samples(p)
    n = np.asarray(n, dtype=float)
    ang = 2 * np.pi * np.multiply.outer(n, k) / N
    w = np.where(k == 0, 1.0, 2.0)
    return (np.cos(ang) * (w * b)).sum(axis=-1)


def spline_v(p: int, N: int, n) -> np.ndarray:
    """``v^p[n] = w^{-n/2} sum_k b^p(k + 1/2) w^{-kn}`` (2N-periodic, real).

    Evaluated at any integer ``n``; ``v[n + N] = -v[n]`` holds by construction.
    """
    t, b = _half_integer_samples(p)
    n = np.asarray(n, dtype=float)
    ang = 2 * np.pi * np.multiply.outer(n, t) / N
    return 2.0 * (np.cos(ang) * b).sum(axis=-1)


def spline_u_series(p: int, N: int, n, terms: int = 50) -> np.ndarray:
    """Truncated infinite-series form of ``u^p[n]`` (validation only)."""
    n = np.atleast_1d(np.asarray(n, dtype=float))
    x = n / N
    out = np.zeros_like(x)
    for l in range(-terms, terms + 1):
        arg = x + l
        out += np.sinc(arg) ** p
    return out


@dataclass(frozen=True)
class SplineTables:
    """Precomputed spline sequences for one ``(p, N)`` pair.

    Arrays are indexed by frequency bin ``0..N-1``. ``v`` is stored over one
    period only; use :meth:`v_at` for indices outside it.
    """

    p: int
    N: int
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    bhat1: np.ndarray = field(repr=False)
    upsilon: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)

    def v_at(self, n) -> np.ndarray:
        """Antiperiodic accessor: ``v[n + N] = -v[n]``."""
        n = np.asarray(n)
        q, r = np.divmod(n, self.N)
        return np.where(q % 2 == 0, 1.0, -1.0) * self.v[r]

    def beta_at(self, n) -> np.ndarray:
        return self.beta[np.mod(n, self.N)]

    def alpha_at(self, n) -> np.ndarray:
        return self.alpha[np.mod(n, self.N)]


def build_tables(p: int, N: int) -> SplineTables:
    """Build the spline sequences for order ``p`` and period ``N``.

    Raises
    ------
    ValueError
        If ``N`` is odd or does not exceed ``2 p``.
    """
    p = check_order(p)
    if int(N) != N or N % 2:
        raise ValueError(f"period N={N} must be an even integer")
    N = int(N)
    if N <= 2 * p:
        raise ValueError(f"period N={N} too short for order p={p}; need N > {2 * p}")

    n = np.arange(N)
    u = spline_u(p, N, n)
    v = spline_v(p, N, n)
    # Upper half via u[2n+N] = u[2n], v[2n+N] = -v[2n] so that bins n and
    # n+N/2 share the same rounded u, v and the power-complementarity
    # beta[n]^2 + beta[n+N/2]^2 = 2 holds to rounding.
    half = np.arange(N // 2)
    uh = spline_u(p, N, 2 * half)
    vh = spline_v(p, N, 2 * half)
    uh[0], vh[0] = 1.0, 1.0
    r = np.hypot(uh, vh)
    bhat1 = np.concatenate([(uh + vh) / 2, (uh - vh) / 2])
    upsilon = np.concatenate([r ** 2 / 4, r ** 2 / 4])
    beta = np.concatenate([(uh + vh) / r, (uh - vh) / r])
    beta_shift = np.roll(beta, -(N // 2))
    alpha = np.exp(2j * np.pi * n / N) * beta_shift
    alpha[0] = 0.0
    alpha[N // 2] = -beta[0]

    for arr in (u, v, bhat1, upsilon, beta, alpha):
        arr.setflags(write=False)
    return SplineTables(p, N, u, v, bhat1, upsilon, beta, alpha)
