"""Workflows behind the command line: configuration, file round trips,
denoising, the waveform atlas and timing runs."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import filterbank
from .atlas import direction_census, gen_waveform, gen_waveform2d
from .containers import Container2D, CropRecord, load_qwp1, load_qwp2, save_qwp1, save_qwp2
from .filterbank import Kind, get_tables
from .imaging import (MetricsReport, extend_symmetric, normalize_to_bytes, psnr,
                      read_image, write_image)
from .splines import check_order
from .wpt1d import check_depth, level_cover, wavelet_cover, wpt_forward, wpt_inverse
from .wpt2d import TREES, qwpt2_forward, qwpt2_inverse, threshold_coeffs


class ConfigError(ValueError):
    """Invalid job parameters, detected before any computation."""


class InputFormatError(OSError):
    """An input file exists but cannot be parsed."""


# ---------------------------------------------------------------- config

def parse_threshold(text: str) -> tuple[str, float, bool]:
    """Parse ``RULE:VALUE``.

    ``VALUE`` is an absolute magnitude (``hard:40``) or a multiple of the
    noise level (``hard:3sigma``). Returns ``(rule, value, relative)``.
    """
    rule, sep, value = str(text).partition(":")
    rule = rule.strip().lower()
    if not sep or rule not in ("hard", "soft"):
        raise ConfigError(f"threshold must look like hard:VALUE or soft:VALUE, got {text!r}")
    value = value.strip().lower()
    relative = value.endswith("sigma")
    if relative:
        value = value[: -len("sigma")] or "1"
    try:
        tau = float(value)
    except ValueError:
        raise ConfigError(f"bad threshold value in {text!r}") from None
    if not tau >= 0 or math.isinf(tau):
        raise ConfigError(f"threshold must be finite and nonnegative, got {tau}")
    return rule, tau, relative


@dataclass
class JobConfig:
    """Parameters of one CLI job; :meth:`validate` fails fast on bad values."""

    command: str
    p: int = 9
    levels: int = 3
    kind: str = "real"
    tree: str = "both"
    threshold: str | None = None
    input: str | None = None
    output: str | None = None
    reference: str | None = None
    extension: str = "symmetric"
    cover: str = "level"
    sigma: float | None = None
    noise_sigma: float | None = None
    seed: int = 0
    N: int | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> "JobConfig":
        try:
            check_order(self.p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if int(self.levels) != self.levels or self.levels < 1:
            raise ConfigError(f"levels must be a positive integer, got {self.levels}")
        try:
            Kind.parse(self.kind)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.tree not in ("plus", "minus", "both"):
            raise ConfigError(f"tree must be plus, minus or both, got {self.tree!r}")
        if self.extension not in ("symmetric", "none"):
            raise ConfigError(f"unknown extension policy {self.extension!r}")
        if self.cover not in ("level", "wavelet"):
            raise ConfigError(f"unknown cover {self.cover!r}")
        if self.threshold is not None:
            parse_threshold(self.threshold)
        for name in ("sigma", "noise_sigma"):
            val = getattr(self, name)
            if val is not None and not val >= 0:
                raise ConfigError(f"{name} must be nonnegative, got {val}")
        if self.N is not None and (self.N % 2 or self.N <= 2 * self.p):
            raise ConfigError(f"N={self.N} must be even and exceed 2p={2 * self.p}")
        return self

    @property
    def trees(self) -> tuple:
        return TREES if self.tree == "both" else (self.tree,)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


# ---------------------------------------------------------------- signals

def read_signal(path) -> np.ndarray:
    """Read a 1D real signal from ``.npy`` or from text (one value per line or comma-separated)."""
    path = Path(path)
    try:
        if path.suffix == ".npy":
            x = np.load(path)
        else:
            x = np.loadtxt(path, delimiter=",", ndmin=1)
    except ValueError as exc:
        raise InputFormatError(f"cannot parse signal {path}: {exc}") from None
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise InputFormatError(f"signal file {path} is empty")
    return x


def write_signal(path, x) -> None:
    path = Path(path)
    if path.suffix == ".npy":
        np.save(path, np.asarray(x))
    else:
        np.savetxt(path, np.asarray(x), fmt="%.17g")


def _load_image(path):
    try:
        return read_image(path)
    except ValueError as exc:
        raise InputFormatError(f"cannot read image {path}: {exc}") from None


def _channels(data: np.ndarray) -> list:
    return [data] if data.ndim == 2 else [data[..., c] for c in range(data.shape[2])]


def _stack(channels: list) -> np.ndarray:
    return channels[0] if len(channels) == 1 else np.stack(channels, axis=-1)


def _write_output(path, data: np.ndarray, bit_depth: int) -> None:
    if Path(path).suffix == ".npy":
        np.save(path, data)
    else:
        write_image(path, data, bit_depth or 8)


# ---------------------------------------------------------------- 1D jobs

def run_tables(cfg: JobConfig) -> list:
    """Rows ``(n, u, v, bhat1, upsilon, beta, alpha.re, alpha.im)``."""
    N = cfg.N if cfg.N is not None else 64
    t = get_tables(cfg.p, N)
    rows = [(n, t.u[n], t.v[n], t.bhat1[n], t.upsilon[n], t.beta[n],
             t.alpha[n].real, t.alpha[n].imag) for n in range(N)]
    return rows


TABLE_HEADER = ("n", "u", "v", "bhat1", "upsilon", "beta", "alpha_re", "alpha_im")


def run_decompose1d(cfg: JobConfig):
    x = read_signal(cfg.input)
    tree = wpt_forward(x, cfg.p, cfg.levels, cfg.kind)
    if cfg.output:
        save_qwp1(cfg.output, tree)
    return tree


def signal_from_tree(tree, cover: str = "level") -> np.ndarray:
    """Real signal recovered from a tree of any kind."""
    sel = level_cover(tree.depth) if cover == "level" else wavelet_cover(tree.depth)
    out = wpt_inverse(tree, sel)
    if tree.kind in (Kind.QPLUS, Kind.QMINUS):
        out = out.real / 2
    return np.asarray(out, dtype=float)


def run_reconstruct1d(cfg: JobConfig) -> np.ndarray:
    x = signal_from_tree(load_qwp1(cfg.input), cfg.cover)
    if cfg.output:
        write_signal(cfg.output, x)
    return x


def run_hilbert(cfg: JobConfig) -> np.ndarray:
    from .wpt1d import hilbert

    h = hilbert(read_signal(cfg.input))
    if cfg.output:
        write_signal(cfg.output, h)
    return h


# ---------------------------------------------------------------- 2D jobs

def prepare_image(data: np.ndarray, cfg: JobConfig) -> tuple[np.ndarray, CropRecord]:
    """Apply the extension policy; ``none`` requires an already valid square."""
    if cfg.extension == "symmetric":
        return extend_symmetric(data, cfg.levels)
    H, W = data.shape[:2]
    if H != W:
        raise ValueError(f"image {H}x{W} is not square; use symmetric extension")
    return np.asarray(data, dtype=float), CropRecord(H, W)


def run_decompose2d(cfg: JobConfig) -> Container2D:
    img = _load_image(cfg.input)
    ext, crop = prepare_image(img.data, cfg)
    channels = [qwpt2_forward(ch, cfg.p, cfg.levels, cfg.trees) for ch in _channels(ext)]
    box = Container2D(channels, crop, img.bit_depth)
    if cfg.output:
        save_qwp2(cfg.output, box)
    return box


def image_from_container(box: Container2D) -> np.ndarray:
    out = [box.crop.crop(qwpt2_inverse(c).image) for c in box.channels]
    return _stack(out)


def dump_intermediates(box: Container2D, outdir) -> list:
    """Write the tree signals of every channel for inspection.

    For each channel ``c`` and tree ``t`` this writes ``x_t_c.npy`` (the
    complex square-domain signal), ``x_t_c_re.pgm`` (its real part) and
    ``x_t_c_spectrum.pgm`` (log magnitude spectrum, zero frequency
    centered). Returns the written file names.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    names = []
    for c, coeffs in enumerate(box.channels):
        rec = qwpt2_inverse(coeffs)
        for tree, x in (("plus", rec.x_plus), ("minus", rec.x_minus)):
            if x is None:
                continue
            stem = f"x_{tree}_{c}"
            np.save(out / f"{stem}.npy", x)
            write_image(out / f"{stem}_re.pgm", normalize_to_bytes(x.real), 8)
            spec = np.log1p(np.abs(np.fft.fftshift(np.fft.fft2(x))))
            write_image(out / f"{stem}_spectrum.pgm", normalize_to_bytes(spec), 8)
            names += [f"{stem}.npy", f"{stem}_re.pgm", f"{stem}_spectrum.pgm"]
    return names


def run_reconstruct2d(cfg: JobConfig) -> np.ndarray:
    box = load_qwp2(cfg.input)
    img = image_from_container(box)
    if cfg.output:
        _write_output(cfg.output, img, box.bit_depth)
    if cfg.extra.get("dump_intermediates"):
        dump_intermediates(box, cfg.extra["dump_intermediates"])
    return img


def estimate_sigma(coeffs) -> float:
    """Noise level from the finest diagonal block (median absolute deviation).

    Each coefficient component of a level-1 block carries noise of standard
    deviation ``sigma * sqrt(2)``.
    """
    tree = next(iter(coeffs.trees.values()))
    z = tree[0][1, 1]
    comps = np.concatenate([z.real.ravel(), z.imag.ravel()])
    return float(np.median(np.abs(comps)) / 0.6745 / math.sqrt(2))


def denoise_channel(noisy: np.ndarray, cfg: JobConfig, sigma: float | None = None):
    """Threshold one channel; returns ``(output, coefficients, tau)``."""
    ext, crop = prepare_image(noisy, cfg)
    coeffs = qwpt2_forward(ext, cfg.p, cfg.levels, cfg.trees)
    rule, value, relative = parse_threshold(cfg.threshold or "hard:3sigma")
    if relative:
        if sigma is None:
            sigma = estimate_sigma(coeffs)
        tau = value * sigma * math.sqrt(2)
    else:
        tau = value
    cleaned = threshold_coeffs(coeffs, rule, tau)
    return crop.crop(qwpt2_inverse(cleaned).image), coeffs, tau


def run_denoise(cfg: JobConfig, image=None, reference=None) -> MetricsReport:
    """Denoise an image and report quality against a reference.

    With ``noise_sigma`` set, the input is treated as clean, Gaussian noise
    drawn from ``cfg.seed`` is added, and the clean input is the reference.
    Otherwise the input is the noisy image and ``reference`` (or
    ``cfg.reference``) is optional; without one, metrics are against the
    noisy input.
    """
    cfg.validate()
    bit_depth = 8
    if image is None:
        loaded = _load_image(cfg.input)
        image, bit_depth = loaded.data, loaded.bit_depth
    image = np.asarray(image, dtype=float)
    sigma = cfg.sigma
    if cfg.noise_sigma is not None:
        reference = image
        noisy = image + cfg.rng().normal(0.0, cfg.noise_sigma, image.shape)
        sigma = cfg.noise_sigma if sigma is None else sigma
    else:
        noisy = image
        if reference is None and cfg.reference:
            reference = _load_image(cfg.reference).data
    if reference is None:
        reference = noisy

    outs, energy = [], None
    for ch in _channels(noisy):
        out, coeffs, _ = denoise_channel(ch, cfg, sigma)
        outs.append(out)
        lev = [coeffs.level_energy(m) for m in range(1, cfg.levels + 1)]
        energy = lev if energy is None else [a + b for a, b in zip(energy, lev)]
    result = _stack(outs)
    if cfg.output:
        _write_output(cfg.output, result, bit_depth)
    cfg.extra["output"] = result
    cfg.extra["noisy"] = noisy
    return MetricsReport(
        psnr=psnr(reference, result),
        max_abs_err=float(np.max(np.abs(reference - result))),
        per_level_energy=energy,
        psnr_input=psnr(reference, noisy),
    )


def round_trip_report(image: np.ndarray, p: int, M: int) -> MetricsReport:
    """Forward and inverse dual-tree transform of a square image, with metrics."""
    coeffs = qwpt2_forward(image, p, M)
    rec = qwpt2_inverse(coeffs).image
    return MetricsReport(psnr(image, rec), float(np.max(np.abs(image - rec))),
                         [coeffs.level_energy(m) for m in range(1, M + 1)])


# ---------------------------------------------------------------- atlas

def write_atlas(p: int, N: int, m: int, outdir, kinds=("psi", "phi", "qplus", "qminus"),
                csv2d: bool = True) -> dict:
    """Write the level-``m`` waveforms and a JSON index to ``outdir``."""
    check_depth(N, m)
    out = Path(outdir)
    (out / "1d").mkdir(parents=True, exist_ok=True)
    (out / "2d").mkdir(parents=True, exist_ok=True)
    index = {"p": p, "N": N, "m": m, "waveforms1d": [], "waveforms2d": []}

    for kind in kinds:
        name = Kind.parse(kind)
        for l in range(2 ** m):
            w = gen_waveform(p, N, m, l, name)
            fname = f"1d/{w.name}_m{m}_l{l}.csv"
            data = np.column_stack([np.arange(N), w.samples.real, w.samples.imag])
            np.savetxt(out / fname, data, fmt=["%d", "%.17g", "%.17g"], delimiter=",",
                       header="k,re,im", comments="")
            index["waveforms1d"].append({"p": p, "N": N, "m": m, "l": l,
                                         "kind": w.name, "file": fname})

    census = direction_census(p, N, m)
    klass = {member: cid for cid, members in census.items() for member in members}
    for sign in ("+", "-"):
        tag = "plus" if sign == "+" else "minus"
        for j in range(2 ** m):
            for l in range(2 ** m):
                w = gen_waveform2d(p, N, m, j, l, sign)
                w.direction_class = klass[(j, l, sign)]
                stem = f"2d/theta_{tag}_m{m}_j{j}_l{l}"
                write_image(out / f"{stem}.pgm", normalize_to_bytes(w.samples), 8)
                entry = {"p": p, "N": N, "m": m, "j": j, "l": l, "sign": sign,
                         "orientation": list(w.orientation),
                         "directionClass": w.direction_class,
                         "spectralCenter": list(w.center), "image": f"{stem}.pgm"}
                if csv2d:
                    np.savetxt(out / f"{stem}.csv", w.samples, fmt="%.17g", delimiter=",")
                    entry["file"] = f"{stem}.csv"
                index["waveforms2d"].append(entry)
    index["directionClasses"] = len(census)
    with open(out / "index.json", "w") as fh:
        json.dump(index, fh, indent=1)
    return index


# ---------------------------------------------------------------- bench

BENCH_HEADER = ("name", "N", "M", "p", "cold_s", "warm_s", "repeats")


def _clear_caches() -> None:
    filterbank.get_tables.cache_clear()
    filterbank._first_level.cache_clear()


def _time(fn, repeats: int) -> tuple[float, float]:
    _clear_caches()
    t0 = time.perf_counter()
    fn()
    cold = time.perf_counter() - t0
    warm = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        warm = min(warm, time.perf_counter() - t0)
    return cold, warm


def run_bench(cfg: JobConfig | None = None, repeats: int = 3, include_2d: bool = True) -> list:
    """Wall-clock timings; the first row is the 1D reference configuration.

    ``cold_s`` includes building the spline tables, ``warm_s`` is the best
    of ``repeats`` runs with tables cached.
    """
    rng = (cfg.rng() if cfg else np.random.default_rng(0))
    rows = []
    N, M, p = 245760, 8, 13
    x = rng.standard_normal(N)
    for kind in ("real", "qplus"):
        cold, warm = _time(lambda: wpt_forward(x, p, M, kind), repeats)
        rows.append((f"forward1d_{kind}", N, M, p, cold, warm, repeats))
    if include_2d:
        N2, M2, p2 = 512, 4, 9
        img = rng.standard_normal((N2, N2))
        cold, warm = _time(lambda: qwpt2_inverse(qwpt2_forward(img, p2, M2)), repeats)
        rows.append(("forward_inverse2d", N2, M2, p2, cold, warm, repeats))
    if cfg is not None and cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(BENCH_HEADER)
            w.writerows(rows)
    return rows
