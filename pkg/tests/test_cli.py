import json

import numpy as np
import pytest

from splineqwp import hilbert, jobs
from splineqwp.cli import EXIT_IO, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from splineqwp.containers import load_qwp2
from splineqwp.imaging import read_image, write_image


@pytest.fixture
def signal_file(tmp_path, rng):
    x = rng.standard_normal(128)
    path = tmp_path / "x.txt"
    jobs.write_signal(path, x)
    return path, x


@pytest.fixture
def image_file(tmp_path):
    y, x = np.mgrid[0:60, 0:44]
    img = (100 + 80 * np.sin(x / 5.0) * np.cos(y / 7.0)).round()
    path = tmp_path / "img.pgm"
    write_image(path, img)
    return path, img


@pytest.mark.parametrize("kind", ["real", "complementary", "qplus", "qminus"])
@pytest.mark.parametrize("cover", ["level", "wavelet"])
def test_1d_round_trip(kind, cover, signal_file, tmp_path):
    path, x = signal_file
    box, out = tmp_path / "c.qwp", tmp_path / "y.txt"
    assert main(["decompose1d", "--in", str(path), "--out", str(box), "--p", "5",
                 "--levels", "3", "--kind", kind]) == EXIT_OK
    assert main(["reconstruct1d", "--in", str(box), "--out", str(out),
                 "--cover", cover]) == EXIT_OK
    assert np.abs(jobs.read_signal(out) - x).max() < 1e-11


def test_hilbert_command(signal_file, tmp_path):
    path, x = signal_file
    out = tmp_path / "h.txt"
    assert main(["hilbert", "--in", str(path), "--out", str(out)]) == EXIT_OK
    np.testing.assert_allclose(jobs.read_signal(out), hilbert(x), atol=1e-14)


def test_tables_command(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["tables", "--p", "3", "--n", "16", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(jobs.TABLE_HEADER) and len(lines) == 17
    assert main(["tables", "--p", "3", "--n", "16"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0].startswith("n,u,v")


@pytest.mark.parametrize("tree", ["both", "plus", "minus"])
def test_2d_round_trip_restores_pixels(tree, image_file, tmp_path):
    path, img = image_file
    box, out = tmp_path / "c.qwp2", tmp_path / "r.pgm"
    assert main(["decompose2d", "--in", str(path), "--out", str(box), "--levels", "2",
                 "--tree", tree]) == EXIT_OK
    assert main(["reconstruct2d", "--in", str(box), "--out", str(out)]) == EXIT_OK
    back = read_image(out)
    assert back.data.shape == img.shape
    if tree == "both":
        np.testing.assert_array_equal(back.data, img)


def test_psnr_command(image_file, tmp_path, capsys):
    path, img = image_file
    assert main(["psnr", "--in", str(path), "--ref", str(path)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "inf"


def test_denoise_command_writes_report(image_file, tmp_path, capsys):
    path, _ = image_file
    out, rep = tmp_path / "d.png", tmp_path / "rep.json"
    code = main(["denoise", "--in", str(path), "--out", str(out), "--add-noise", "15",
                 "--seed", "2", "--levels", "2", "--threshold", "soft:2sigma",
                 "--report", str(rep)])
    assert code == EXIT_OK
    data = json.loads(rep.read_text())
    assert set(data) == {"psnr", "maxAbsErr", "perLevelEnergy", "psnrInput"}
    assert data["psnr"] > data["psnrInput"]
    assert read_image(out).data.shape == (60, 44)
    assert json.loads(capsys.readouterr().out) == data


def test_atlas_command(tmp_path):
    out = tmp_path / "atlas"
    assert main(["atlas", "--p", "5", "--n", "32", "--level", "2", "--out", str(out)]) == EXIT_OK
    index = json.loads((out / "index.json").read_text())
    assert len(index["waveforms1d"]) == 4 * 4
    assert len(index["waveforms2d"]) == 2 * 16
    assert index["directionClasses"] == 2 * (2 ** 3 - 1)
    for entry in index["waveforms2d"]:
        assert (out / entry["image"]).exists() and (out / entry["file"]).exists()
        assert set(entry) >= {"orientation", "directionClass", "spectralCenter", "sign"}
    first = index["waveforms1d"][0]
    table = np.loadtxt(out / first["file"], delimiter=",", skiprows=1)
    assert table.shape == (32, 3)


def test_atlas_without_2d_csv(tmp_path):
    out = tmp_path / "atlas"
    assert main(["atlas", "--p", "3", "--n", "16", "--level", "1", "--kind", "qplus",
                 "--no-2d-csv", "--out", str(out)]) == EXIT_OK
    index = json.loads((out / "index.json").read_text())
    assert len(index["waveforms1d"]) == 2
    assert "file" not in index["waveforms2d"][0]


def test_bench_command(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--repeats", "1", "--no-2d", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(jobs.BENCH_HEADER) and len(lines) == 3


@pytest.mark.parametrize("argv", [
    ["nope"],
    [],
    ["decompose1d", "--in", "x"],
    ["tables", "--p", "30"],
    ["tables", "--p", "9", "--n", "11"],
    ["denoise", "--in", "x.pgm", "--threshold", "wiener:3"],
    ["decompose2d", "--in", "x.pgm", "--out", "y", "--tree", "left"],
])
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_io_errors(tmp_path, signal_file):
    missing = str(tmp_path / "missing.txt")
    assert main(["hilbert", "--in", missing, "--out", str(tmp_path / "o")]) == EXIT_IO
    assert main(["reconstruct2d", "--in", missing, "--out", str(tmp_path / "o.pgm")]) == EXIT_IO
    bad = tmp_path / "bad.qwp"
    bad.write_bytes(b"QWP1\x01\x00")
    assert main(["reconstruct1d", "--in", str(bad), "--out", str(tmp_path / "o")]) == EXIT_IO
    garbage = tmp_path / "g.pgm"
    garbage.write_bytes(b"not an image")
    assert main(["psnr", "--in", str(garbage), "--ref", str(garbage)]) == EXIT_IO


def test_numeric_precondition(signal_file, tmp_path):
    path, _ = signal_file
    # 128 samples cannot be split 7 times at order 9
    code = main(["decompose1d", "--in", str(path), "--out", str(tmp_path / "c"),
                 "--levels", "7"])
    assert code == EXIT_NUMERIC


def test_reconstruct2d_dumps_intermediates(image_file, tmp_path):
    path, img = image_file
    box, dump = tmp_path / "c.qwp2", tmp_path / "dump"
    assert main(["decompose2d", "--in", str(path), "--out", str(box), "--levels", "2"]) == 0
    assert main(["reconstruct2d", "--in", str(box), "--out", str(tmp_path / "r.pgm"),
                 "--dump-intermediates", str(dump)]) == EXIT_OK
    xp, xm = np.load(dump / "x_plus_0.npy"), np.load(dump / "x_minus_0.npy")
    assert xp.shape == (64, 64) and np.iscomplexobj(xp)
    # the two tree signals recombine into the extended image
    crop = load_qwp2(box).crop
    np.testing.assert_allclose(crop.crop((xp + xm).real / 8), img, atol=1e-9)
    assert (dump / "x_plus_0_re.pgm").exists() and (dump / "x_minus_0_spectrum.pgm").exists()
