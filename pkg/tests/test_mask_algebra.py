import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import disk_offsets, naive_close3, naive_dilate, square_offsets
from shape_aligner.errors import DimensionMismatch
from shape_aligner.mask_algebra import (
    StructuringElement,
    area,
    close,
    complement,
    dilate,
    hadamard,
    intersect,
    iou,
    translate,
    union,
)

masks = arrays(bool, st.tuples(st.integers(1, 20), st.integers(1, 20)))


def test_radius_zero_is_identity(rng):
    m = rng.random((9, 11)) < 0.3
    np.testing.assert_array_equal(dilate(m, StructuringElement("disk", 0)), m)
    np.testing.assert_array_equal(dilate(m, StructuringElement("square", 0)), m)


def test_single_pixel_disk_radius_two():
    m = np.zeros((11, 11), bool)
    m[5, 5] = True
    out = dilate(m, StructuringElement("disk", 2))
    assert out.sum() == 13
    ys, xs = np.nonzero(out)
    assert all((x - 5) ** 2 + (y - 5) ** 2 <= 4 for x, y in zip(xs, ys))


@pytest.mark.parametrize("shape", ["disk", "square"])
def test_dilate_matches_naive_oracle(rng, shape):
    m = rng.random((32, 32)) < 0.05
    offsets = disk_offsets(3) if shape == "disk" else square_offsets(3)
    np.testing.assert_array_equal(dilate(m, StructuringElement(shape, 3)), naive_dilate(m, offsets))


def test_dilate_clips_at_border():
    m = np.zeros((5, 5), bool)
    m[0, 0] = True
    out = dilate(m, StructuringElement("square", 1))
    assert out.sum() == 4


@settings(max_examples=50, deadline=None)
@given(masks, st.integers(0, 3))
def test_dilation_extensive_and_union_commuting(m, r):
    se = StructuringElement("disk", r)
    d = dilate(m, se)
    assert (d | m).sum() == d.sum()
    half = np.zeros_like(m)
    half[: m.shape[0] // 2] = m[: m.shape[0] // 2]
    rest = m & ~half
    np.testing.assert_array_equal(dilate(half | rest, se), dilate(half, se) | dilate(rest, se))


@settings(max_examples=50, deadline=None)
@given(masks, st.integers(0, 3))
def test_dilation_monotone(m, r):
    se = StructuringElement("square", r)
    sub = m.copy()
    sub[::2] = False
    assert not (dilate(sub, se) & ~dilate(m, se)).any()


@settings(max_examples=40, deadline=None)
@given(masks, st.integers(0, 2), st.integers(0, 2))
def test_iterated_dilation(m, r1, r2):
    twice = dilate(dilate(m, StructuringElement("disk", r1)), StructuringElement("disk", r2))
    once = dilate(m, StructuringElement("disk", r1 + r2))
    # discrete disks compose to a subset (|a + b| <= |a| + |b|), not a superset
    assert not (twice & ~once).any()
    sq = dilate(dilate(m, StructuringElement("square", r1)), StructuringElement("square", r2))
    np.testing.assert_array_equal(sq, dilate(m, StructuringElement("square", r1 + r2)))


def test_disk_composition_is_strictly_smaller():
    m = np.zeros((9, 9), bool)
    m[4, 4] = True
    twice = dilate(dilate(m, StructuringElement("disk", 1)), StructuringElement("disk", 2))
    once = dilate(m, StructuringElement("disk", 3))
    assert once[6, 6] and not twice[6, 6]


def test_close_matches_oracle(rng):
    m = rng.random((16, 16)) < 0.5
    np.testing.assert_array_equal(close(m), naive_close3(m))


def test_hadamard_identities(rng):
    f = rng.normal(size=(4, 4, 2)).astype(np.float32)
    np.testing.assert_array_equal(hadamard(f, np.ones((4, 4), bool)), f)
    np.testing.assert_array_equal(hadamard(f, np.zeros((4, 4), bool)), np.zeros_like(f))


def test_hadamard_matches_loop(rng):
    f = rng.normal(size=(4, 4)).astype(np.float32)
    m = rng.random((4, 4)) < 0.5
    expected = np.zeros_like(f)
    for y in range(4):
        for x in range(4):
            expected[y, x] = f[y, x] * (1.0 if m[y, x] else 0.0)
    np.testing.assert_array_equal(hadamard(f, m), expected)


def test_hadamard_split_reassembles(rng):
    f = rng.normal(size=(6, 5)).astype(np.float32)
    m = rng.random((6, 5)) < 0.5
    np.testing.assert_array_equal(hadamard(f, m) + hadamard(f, complement(m)), f)


def test_hadamard_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hadamard(np.zeros((3, 3)), np.zeros((3, 4)))


def test_set_algebra(rng):
    m = rng.random((7, 7)) < 0.4
    np.testing.assert_array_equal(complement(complement(m)), m)
    assert area(intersect(m, complement(m))) == 0
    assert area(np.ones((10, 10), bool)) == 100
    np.testing.assert_array_equal(union(m, complement(m)), np.ones_like(m))
    with pytest.raises(DimensionMismatch):
        intersect(m, np.zeros((3, 3), bool))


def test_iou_cases():
    a = np.zeros((8, 8), bool)
    b = np.zeros((8, 8), bool)
    assert iou(a, b) == 1.0
    a[0:4, 0:4] = True
    assert iou(a, a) == 1.0
    c = np.zeros((8, 8), bool)
    c[5:, 5:] = True
    assert iou(a, c) == 0.0
    b[0:4, 2:6] = True
    assert iou(a, b) == pytest.approx(8 / 24)


def test_translate():
    m = np.zeros((6, 6), bool)
    m[1, 1] = m[5, 5] = True
    t = translate(m, 2, -1)
    assert t[0, 3] and t.sum() == 1
