import numpy as np
import pytest
from hypothesis import given, strategies as st

from splineqwp.atlas import gen_waveform
from splineqwp.wpt2d import (QwpCoeffs2D, check_cover2d, level_cover2d, qwpt2_forward,
                             qwpt2_inverse, threshold_coeffs, tree_signal, wavelet_cover2d)


@st.composite
def quad_covers(draw, M):
    nodes = []

    def visit(m, j, l):
        if m == M or (m >= 1 and draw(st.booleans())):
            nodes.append((m, j, l))
            return
        for a in (0, 1):
            for b in (0, 1):
                visit(m + 1, 2 * j + a, 2 * l + b)

    visit(0, 0, 0)
    return nodes


def brute_force_coeffs(X, p, m, tree):
    """Coefficients as inner products with shifted conjugated product waveforms."""
    N = X.shape[0]
    B, L = 2 ** m, N // 2 ** m
    row_kind = "qplus" if tree == "plus" else "qminus"
    out = np.zeros((B, B, L, L), dtype=complex)
    for j in range(B):
        col = gen_waveform(p, N, m, j, "qplus").samples
        cols = np.array([np.roll(col, B * a) for a in range(L)])
        for l in range(B):
            row = gen_waveform(p, N, m, l, row_kind).samples
            rows = np.array([np.roll(row, B * b) for b in range(L)])
            out[j, l] = np.conj(cols) @ X @ np.conj(rows).T
    return out


def quadrant_energy_outside(img, allowed):
    N = img.shape[0]
    P = np.abs(np.fft.fft2(img)) ** 2
    k = np.arange(N)
    lo = k <= N // 2
    hi = (k >= N // 2) | (k == 0)
    mask = np.zeros((N, N), dtype=bool)
    for rows, cols in allowed:
        r = lo if rows == "lo" else hi
        c = lo if cols == "lo" else hi
        mask |= np.outer(r, c)
    return P[~mask].sum() / P.sum()


@pytest.mark.parametrize("m", [1, 2])
@pytest.mark.parametrize("tree", ["plus", "minus"])
def test_forward_matches_inner_product_oracle(m, tree, rng):
    X = rng.standard_normal((16, 16))
    got = qwpt2_forward(X, 5, m).trees[tree][m - 1]
    np.testing.assert_allclose(got, brute_force_coeffs(X, 5, m, tree), atol=1e-12)


def test_level_one_energy_is_eight_times_image_energy(rng):
    X = rng.standard_normal((32, 32))
    e = np.sum(X ** 2)
    brute = sum(np.sum(np.abs(brute_force_coeffs(X, 9, 1, t)) ** 2) for t in ("plus", "minus"))
    c = qwpt2_forward(X, 9, 3)
    assert brute / e == pytest.approx(8, rel=1e-12)
    for m in (1, 2, 3):
        assert c.level_energy(m) / e == pytest.approx(8, rel=1e-10)


@pytest.mark.parametrize("p", [3, 9, 15])
def test_perfect_reconstruction_random_image(p, rng):
    X = rng.uniform(size=(256, 256))
    rec = qwpt2_inverse(qwpt2_forward(X, p, 3))
    assert np.abs(rec.image - X).max() <= 1e-9
    np.testing.assert_allclose(rec.x_plus.real + rec.x_minus.real, 8 * X, atol=1e-8)


@given(data=st.data(), seed=st.integers(0, 999), p=st.sampled_from([2, 3, 9]))
def test_any_quadtree_cover_reconstructs(data, seed, p):
    M = 3
    plus = data.draw(quad_covers(M))
    minus = data.draw(quad_covers(M))
    X = np.random.default_rng(seed).uniform(size=(64, 64))
    rec = qwpt2_inverse(qwpt2_forward(X, p, M), {"plus": plus, "minus": minus})
    assert np.abs(rec.image - X).max() <= 1e-9


def test_single_trees_split_the_image(rng):
    X = rng.uniform(size=(64, 64))
    parts = {}
    for tree in ("plus", "minus"):
        c = qwpt2_forward(X, 9, 2, trees=(tree,))
        assert c.trees.keys() == {tree}
        parts[tree] = qwpt2_inverse(c).image
    np.testing.assert_allclose(parts["plus"] + parts["minus"], X, atol=1e-12)
    assert quadrant_energy_outside(parts["plus"], [("lo", "lo"), ("hi", "hi")]) < 1e-20
    assert quadrant_energy_outside(parts["minus"], [("lo", "hi"), ("hi", "lo")]) < 1e-20


def test_wavelet_cover2d(rng):
    X = rng.uniform(size=(64, 64))
    c = qwpt2_forward(X, 9, 3)
    check_cover2d(wavelet_cover2d(3), 3)
    np.testing.assert_allclose(qwpt2_inverse(c, wavelet_cover2d(3)).image, X, atol=1e-12)


def test_constant_image():
    X = np.full((64, 64), 7.0)
    c = qwpt2_forward(X, 9, 3)
    np.testing.assert_allclose(qwpt2_inverse(c).image, X, atol=1e-12)
    for tree in c.trees.values():
        level = tree[2]
        rest = np.sum(np.abs(level) ** 2) - np.sum(np.abs(level[0, 0]) ** 2)
        assert rest <= 1e-24 * np.sum(np.abs(level[0, 0]) ** 2)


def test_cosine_lands_in_expected_block():
    N = 512
    k = np.arange(N)[:, None]
    n = np.arange(N)[None, :]
    X = np.cos(2 * np.pi * (78 * k + 178 * n) / N)
    energy = np.sum(np.abs(qwpt2_forward(X, 9, 3, trees=("plus",)).plus[2]) ** 2, axis=(2, 3))
    assert np.unravel_index(np.argmax(energy), energy.shape) == (2, 5)


@pytest.mark.parametrize("tree,allowed", [
    ("plus", [("lo", "lo"), ("hi", "hi")]),
    ("minus", [("lo", "hi"), ("hi", "lo")]),
])
@pytest.mark.parametrize("block", [(1, 0, 1), (2, 2, 1), (3, 5, 6)])
def test_single_block_synthesis_is_quadrant_confined(tree, allowed, block, rng):
    N, M = 64, 3
    c = qwpt2_forward(np.zeros((N, N)), 9, M, trees=(tree,))
    m, j, l = block
    c.trees[tree][m - 1][j, l] = rng.standard_normal(c.trees[tree][m - 1][j, l].shape)
    sel = [(m, j, l)] + [nd for nd in _complement(m, j, l, M)]
    img = tree_signal(c, tree, sel).real
    assert quadrant_energy_outside(img, allowed) <= 1e-10


def _complement(m, j, l, M):
    """A quadtree cover of depth M containing node (m, j, l)."""
    nodes = []

    def visit(mm, jj, ll):
        if mm == m:
            if (jj, ll) != (j, l):
                nodes.append((mm, jj, ll))
            return
        if mm >= 1 and (jj, ll) != (j >> (m - mm), l >> (m - mm)):
            nodes.append((mm, jj, ll))
            return
        for a in (0, 1):
            for b in (0, 1):
                visit(mm + 1, 2 * jj + a, 2 * ll + b)

    visit(0, 0, 0)
    return nodes


def test_linearity(rng):
    X, Y = rng.standard_normal((2, 32, 32))
    cx, cy = qwpt2_forward(X, 9, 2), qwpt2_forward(Y, 9, 2)
    cz = qwpt2_forward(1.5 * X - 0.25 * Y, 9, 2)
    for t in ("plus", "minus"):
        for m in range(2):
            np.testing.assert_allclose(cz.trees[t][m],
                                       1.5 * cx.trees[t][m] - 0.25 * cy.trees[t][m],
                                       atol=1e-12)


def test_threshold_rules(rng):
    c = qwpt2_forward(rng.standard_normal((32, 32)), 3, 2)
    z = c.plus[1].copy()
    tau = 1.3
    hard = threshold_coeffs(c, "hard", tau, keep_lowpass=False).plus[1]
    soft = threshold_coeffs(c, "soft", tau, keep_lowpass=False).plus[1]
    np.testing.assert_array_equal(hard, z * (np.abs(z) > tau))
    np.testing.assert_allclose(soft, z * np.maximum(0, 1 - tau / np.abs(z)))
    assert not np.array_equal(hard, soft)
    np.testing.assert_array_equal(c.plus[1], z)  # input untouched


def test_threshold_zero_is_identity(rng):
    X = rng.standard_normal((32, 32))
    c = qwpt2_forward(X, 9, 2)
    for rule in ("hard", "soft"):
        np.testing.assert_allclose(qwpt2_inverse(threshold_coeffs(c, rule, 0.0)).image, X,
                                   atol=1e-12)


def test_threshold_infinity_keeps_only_lowpass(rng):
    X = rng.standard_normal((64, 64))
    c = qwpt2_forward(X, 9, 3)
    out = qwpt2_inverse(threshold_coeffs(c, "hard", np.inf)).image
    ref = c.copy()
    for t in ref.trees.values():
        low = t[2][0, 0].copy()
        t[2][...] = 0
        t[2][0, 0] = low
    np.testing.assert_allclose(out, qwpt2_inverse(ref).image, atol=1e-12)
    zero = qwpt2_inverse(threshold_coeffs(c, "hard", np.inf, keep_lowpass=False)).image
    assert not zero.any()


def test_threshold_levels_subset(rng):
    c = qwpt2_forward(rng.standard_normal((32, 32)), 9, 2)
    out = threshold_coeffs(c, "hard", 1e9, levels=[2])
    np.testing.assert_array_equal(out.plus[0], c.plus[0])
    assert not out.plus[1][1:].any()


def test_threshold_errors(rng):
    c = qwpt2_forward(rng.standard_normal((16, 16)), 3, 1)
    with pytest.raises(ValueError):
        threshold_coeffs(c, "hard", -1)
    with pytest.raises(ValueError):
        threshold_coeffs(c, "median", 1)


def test_input_validation():
    with pytest.raises(ValueError):
        qwpt2_forward(np.ones((16, 32)), 3, 1)
    with pytest.raises(ValueError):
        qwpt2_forward(np.ones((16, 16)) * 1j, 3, 1)
    with pytest.raises(ValueError):
        qwpt2_forward(np.ones((16, 16)), 3, 3)
    with pytest.raises(ValueError):
        qwpt2_forward(np.ones((16, 16)), 3, 1, trees=("left",))
    with pytest.raises(ValueError):
        check_cover2d([(1, 0, 0)], 1)
    with pytest.raises(ValueError):
        qwpt2_inverse(QwpCoeffs2D(3, 16, 1))
    assert len(level_cover2d(2)) == 16


def test_block_accessor(rng):
    c = qwpt2_forward(rng.standard_normal((16, 16)), 3, 2)
    assert c.block("minus", 2, 3, 1) is c.minus[1][3, 1] or np.shares_memory(
        c.block("minus", 2, 3, 1), c.minus[1])
    assert c.level_energy(1, "plus") + c.level_energy(1, "minus") == pytest.approx(c.level_energy(1))
