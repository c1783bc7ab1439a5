import math

import numpy as np
import pytest

from splineqwp import jobs
from splineqwp.jobs import ConfigError, JobConfig, parse_threshold


def smooth_image(n=256):
    y, x = np.mgrid[0:n, 0:n] / n
    img = 128 + 60 * np.sin(2 * np.pi * 3 * x) * np.cos(2 * np.pi * 2 * y)
    img[n // 4:n // 2, n // 4:3 * n // 4] += 40
    return img


@pytest.mark.parametrize("text, expected", [
    ("hard:3sigma", ("hard", 3.0, True)),
    ("soft:40", ("soft", 40.0, False)),
    ("HARD:sigma", ("hard", 1.0, True)),
    ("soft:0", ("soft", 0.0, False)),
])
def test_parse_threshold(text, expected):
    assert parse_threshold(text) == expected


@pytest.mark.parametrize("text", ["3sigma", "median:3", "hard:", "hard:-1", "soft:inf",
                                  "hard:nan", "hard:xsigma"])
def test_parse_threshold_rejects(text):
    with pytest.raises(ConfigError):
        parse_threshold(text)


@pytest.mark.parametrize("kwargs", [
    {"p": 1}, {"p": 21}, {"levels": 0}, {"kind": "imaginary"}, {"tree": "left"},
    {"extension": "periodic"}, {"cover": "leaf"}, {"sigma": -1.0}, {"N": 15},
    {"N": 10, "p": 9}, {"threshold": "firm:2"},
])
def test_config_fails_fast(kwargs):
    with pytest.raises(ConfigError):
        JobConfig("denoise", **kwargs).validate()


def test_config_trees():
    assert JobConfig("x").trees == ("plus", "minus")
    assert JobConfig("x", tree="minus").trees == ("minus",)


def test_signal_text_round_trip(tmp_path, rng):
    x = rng.standard_normal(50)
    jobs.write_signal(tmp_path / "s.txt", x)
    np.testing.assert_array_equal(jobs.read_signal(tmp_path / "s.txt"), x)
    (tmp_path / "bad.txt").write_text("1.0\nabc\n")
    with pytest.raises(jobs.InputFormatError):
        jobs.read_signal(tmp_path / "bad.txt")


def test_estimate_sigma_on_pure_noise(rng):
    from splineqwp.wpt2d import qwpt2_forward
    noise = rng.normal(0, 7.0, (256, 256))
    est = jobs.estimate_sigma(qwpt2_forward(noise, 9, 1))
    assert est == pytest.approx(7.0, rel=0.05)


def test_zero_threshold_is_identity():
    img = smooth_image(128)
    cfg = JobConfig("denoise", p=9, levels=3, threshold="hard:0")
    rep = jobs.run_denoise(cfg, image=img)
    assert rep.max_abs_err <= 1e-9
    assert math.isinf(rep.psnr) or rep.psnr > 250


def test_denoise_improves_psnr():
    img = smooth_image(256)
    cfg = JobConfig("denoise", p=9, levels=3, threshold="hard:3sigma", noise_sigma=25.0, seed=1)
    rep = jobs.run_denoise(cfg, image=img)
    assert rep.psnr > rep.psnr_input + 3
    assert len(rep.per_level_energy) == 3


def test_denoise_with_estimated_sigma_matches_known():
    img = smooth_image(256)
    known = jobs.run_denoise(JobConfig("denoise", threshold="hard:3sigma", noise_sigma=25.0,
                                       sigma=25.0, seed=4), image=img)
    guessed = jobs.run_denoise(JobConfig("denoise", threshold="hard:3sigma", noise_sigma=25.0,
                                         seed=4), image=img)
    assert abs(known.psnr - guessed.psnr) < 1.0


def test_soft_differs_from_hard_and_is_repeatable():
    img = smooth_image(128)
    base = dict(p=9, levels=3, noise_sigma=20.0, seed=3)
    hard = JobConfig("denoise", threshold="hard:3sigma", **base)
    soft_a = JobConfig("denoise", threshold="soft:3sigma", **base)
    soft_b = JobConfig("denoise", threshold="soft:3sigma", **base)
    jobs.run_denoise(hard, image=img)
    jobs.run_denoise(soft_a, image=img)
    jobs.run_denoise(soft_b, image=img)
    assert not np.allclose(hard.extra["output"], soft_a.extra["output"])
    np.testing.assert_array_equal(soft_a.extra["output"], soft_b.extra["output"])
    np.testing.assert_array_equal(soft_a.extra["noisy"], soft_b.extra["noisy"])


def test_seed_changes_noise():
    img = smooth_image(64)
    a = JobConfig("denoise", levels=2, threshold="hard:3sigma", noise_sigma=5.0, seed=0)
    b = JobConfig("denoise", levels=2, threshold="hard:3sigma", noise_sigma=5.0, seed=1)
    jobs.run_denoise(a, image=img)
    jobs.run_denoise(b, image=img)
    assert not np.array_equal(a.extra["noisy"], b.extra["noisy"])


def test_denoise_color_channelwise(rng):
    img = np.stack([smooth_image(64), 255 - smooth_image(64), np.full((64, 64), 90.0)], -1)
    cfg = JobConfig("denoise", levels=2, threshold="hard:0")
    rep = jobs.run_denoise(cfg, image=img)
    assert cfg.extra["output"].shape == img.shape
    assert rep.max_abs_err < 1e-9


def test_non_square_without_extension_is_rejected():
    cfg = JobConfig("denoise", levels=2, threshold="hard:0", extension="none")
    with pytest.raises(ValueError):
        jobs.run_denoise(cfg, image=np.zeros((64, 48)))


def test_round_trip_report():
    rep = jobs.round_trip_report(smooth_image(64), 5, 2)
    assert rep.max_abs_err < 1e-10 and rep.psnr > 200


def test_bench_rows():
    rows = jobs.run_bench(repeats=1, include_2d=True)
    assert [r[0] for r in rows] == ["forward1d_real", "forward1d_qplus", "forward_inverse2d"]
    assert rows[0][1:4] == (245760, 8, 13)
    for r in rows:
        assert len(r) == len(jobs.BENCH_HEADER)
        assert r[4] > 0 and r[5] > 0
