import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from barcode_tv.degrade import convolve_same, hat_kernel
from barcode_tv.functional import (
    aniso_tv,
    divergence,
    f1_value,
    f2_cost,
    f2_value,
    f3_value,
    forward_diff_matrices,
    iso_tv,
)
from barcode_tv.grid import GridImage
from oracles import brute_tv

shapes = st.tuples(st.integers(2, 7), st.integers(2, 7))
real_images = arrays(np.float64, shapes, elements=st.floats(-3, 3, allow_nan=False))
binary_images = arrays(np.float64, shapes, elements=st.sampled_from([0.0, 1.0]))


def pixel(n=5):
    u = np.zeros((n, n))
    u[n // 2, n // 2] = 1.0
    return u


def test_diff_shapes():
    ops = forward_diff_matrices(2, 2)
    assert ops.dx.shape == (2, 4) and ops.dy.shape == (2, 4)
    ops = forward_diff_matrices(5, 3)
    assert ops.dx.shape == (3 * 4, 15) and ops.dy.shape == (2 * 5, 15)


def test_diff_rows_are_plus_minus_one():
    ops = forward_diff_matrices(4, 3)
    for mat in (ops.dx, ops.dy):
        dense = mat.toarray()
        assert np.all(np.sort(dense, axis=1)[:, [0, -1]] == [-1, 1])
        assert np.all((dense != 0).sum(axis=1) == 2)


def test_diff_kills_constants():
    ops = forward_diff_matrices(4, 3)
    assert not np.any(ops.dx @ np.full(12, 2.5))
    assert not np.any(ops.dy @ np.full(12, 2.5))


def test_dx_hand_value():
    ops = forward_diff_matrices(2, 2)
    u = np.array([[0.0, 1.0], [0.0, 1.0]])
    assert (ops.dx @ u.ravel()).tolist() == [1.0, 1.0]
    assert (ops.dy @ u.ravel()).tolist() == [0.0, 0.0]


@given(real_images)
def test_matrices_match_array_differences(u):
    h, w = u.shape
    ops = forward_diff_matrices(w, h)
    assert np.allclose(ops.dx @ u.ravel(), np.diff(u, axis=1).ravel())
    assert np.allclose(ops.dy @ u.ravel(), np.diff(u, axis=0).ravel())


def test_forward_diff_validation():
    with pytest.raises(ValueError):
        forward_diff_matrices(1, 4)


def test_aniso_examples():
    assert aniso_tv(np.zeros((4, 4))) == 0
    assert aniso_tv(pixel()) == 4
    for k in (1, 3, 8):
        u = np.zeros((k + 4, k + 4))
        u[2 : 2 + k, 2 : 2 + k] = 1
        assert aniso_tv(u) == 4 * k


@given(real_images)
def test_aniso_matches_loops(u):
    assert aniso_tv(u) == pytest.approx(brute_tv(u), abs=1e-9)


def test_iso_examples():
    assert iso_tv(np.zeros((3, 3))) == 0
    assert iso_tv(pixel()) == pytest.approx(2 + math.sqrt(2), abs=1e-15)


@given(real_images)
def test_seminorm_equivalence(u):
    assert iso_tv(u) <= aniso_tv(u) + 1e-12
    assert aniso_tv(u) <= math.sqrt(2) * iso_tv(u) + 1e-12


@given(arrays(np.int64, shapes, elements=st.integers(0, 5)))
def test_coarea(u):
    levels = sum(aniso_tv((u > t).astype(float)) for t in range(5))
    assert aniso_tv(u) == pytest.approx(levels, abs=1e-9)


def test_translation_invariance(rng):
    u = np.zeros((10, 10))
    u[2:8, 2:8] = rng.random((6, 6))
    shifted = np.roll(u, 1, axis=1)
    assert aniso_tv(shifted) == pytest.approx(aniso_tv(u), abs=1e-12)
    assert aniso_tv(np.roll(u, -1, axis=0)) == pytest.approx(aniso_tv(u), abs=1e-12)


def test_divergence_zero():
    assert not divergence(np.zeros((3, 3)), np.zeros((2, 4))).values.any()


@given(shapes, st.integers(0, 2**32 - 1))
def test_adjointness(shape, seed):
    rng = np.random.default_rng(seed)
    h, w = shape
    u = rng.normal(size=(h, w))
    v1, v2 = rng.normal(size=(h, w - 1)), rng.normal(size=(h - 1, w))
    lhs = (np.diff(u, axis=1) * v1).sum() + (np.diff(u, axis=0) * v2).sum()
    assert lhs + (u * divergence(v1, v2).values).sum() == pytest.approx(0, abs=1e-12)


def test_divergence_matches_transpose():
    ops = forward_diff_matrices(5, 4)
    rng = np.random.default_rng(1)
    v1, v2 = rng.normal(size=(4, 4)), rng.normal(size=(3, 5))
    expected = -(ops.dx.T @ v1.ravel() + ops.dy.T @ v2.ravel())
    assert np.allclose(divergence(v1, v2).values.ravel(), expected, atol=1e-14)


def test_divergence_telescopes():
    v1 = np.ones((4, 5))
    out = divergence(v1, np.zeros((3, 6))).values
    assert np.all(out[:, 0] == 1) and np.all(out[:, -1] == -1)
    assert not out[:, 1:-1].any()


def test_divergence_shape_check():
    with pytest.raises(ValueError):
        divergence(np.zeros((3, 3)), np.zeros((3, 4)))


def test_f1_examples():
    f = pixel()
    assert f1_value(f, f, 7.0) == aniso_tv(f) == 4
    assert f1_value(np.zeros_like(f), f, 3.0) == 3.0
    with pytest.raises(ValueError):
        f1_value(np.zeros((2, 2)), np.zeros((3, 3)), 1.0)


def test_f2_cost_binary():
    f = np.array([[0.0, 1.0]])
    assert f2_cost(f).tolist() == [[1.0, -1.0]]


def test_f2_examples():
    f = np.zeros((4, 4))
    f[1:3, 1:3] = 1
    assert f2_value(np.zeros_like(f), f, 2.0) == 0
    assert f2_value(f, f, 2.0) == aniso_tv(f) - 2.0 * 4
    with pytest.raises(ValueError):
        f2_value(np.full_like(f, 1.1), f, 1.0)


@given(binary_images, st.floats(0, 10), st.integers(0, 2**32 - 1))
def test_f2_f1_constant_shift(f, lam, seed):
    v = np.random.default_rng(seed).integers(0, 2, size=f.shape).astype(float)
    assert f2_value(v, f, lam) - f1_value(v, f, lam) == pytest.approx(-lam * np.abs(f).sum(), abs=1e-9)


def test_f3_examples(rng):
    z = np.zeros((12, 12))
    z[4:8, 4:8] = 1
    k = hat_kernel(3)
    f = rng.random((12, 12))
    assert f3_value(z, f, 2.0, hat_kernel(1)) == f1_value(z, f, 2.0)
    blurred = convolve_same(GridImage(z), k).values
    assert f3_value(z, blurred, 5.0, k) == pytest.approx(aniso_tv(z), abs=1e-12)
    assert f3_value(np.zeros_like(z), f, 1.5, k) == pytest.approx(1.5 * np.abs(f).sum())
