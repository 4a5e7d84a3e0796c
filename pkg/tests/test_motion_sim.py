import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import disk_offsets, naive_dilate, naive_mean_flow, naive_simulate_motion, naive_warp_mask
from shape_aligner.errors import DimensionMismatch, EmptySourceMaskWarning, LengthMismatch
from shape_aligner.mask_algebra import StructuringElement, dilate, iou, translate
from shape_aligner.motion_sim import (
    AverageFlow,
    average_flow,
    compose_flow,
    motion_paste,
    simulate_motion,
    warp_mask,
)
from shape_aligner.synth import Shape


def disk(h, w, cx, cy, r):
    return Shape("disk", radius=r).rasterize(w, h, cx, cy)


def test_average_of_constant_flow(rng):
    flow = np.broadcast_to(np.float32([2, -1]), (8, 8, 2)).copy()
    avg = average_flow(flow, rng.random((8, 8)) < 0.5)
    assert (avg.u_bar, avg.v_bar) == (2.0, -1.0)


def test_average_ignores_outside(rng):
    flow = rng.normal(size=(8, 8, 2)).astype(np.float32)
    mask = rng.random((8, 8)) < 0.4
    perturbed = flow.copy()
    perturbed[~mask] = rng.normal(scale=100, size=perturbed[~mask].shape)
    assert average_flow(flow, mask) == average_flow(perturbed, mask)


def test_average_matches_accumulation_oracle(rng):
    flow = rng.normal(size=(6, 6, 2)).astype(np.float32)
    mask = rng.random((6, 6)) < 0.5
    avg = average_flow(flow, mask)
    u, v = naive_mean_flow(flow, mask)
    assert avg.u_bar == pytest.approx(u, abs=1e-6)
    assert avg.v_bar == pytest.approx(v, abs=1e-6)
    assert avg.source_area == mask.sum()


def test_average_empty_mask_falls_back_to_zero():
    with pytest.warns(EmptySourceMaskWarning):
        avg = average_flow(np.ones((4, 4, 2), np.float32), np.zeros((4, 4), bool))
    assert avg == AverageFlow(0.0, 0.0, 0)


def test_average_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        average_flow(np.zeros((4, 4, 2)), np.zeros((4, 5), bool))


def test_paste_empty_mask_is_zero():
    out = motion_paste(AverageFlow(1, 1, 3), np.zeros((5, 5), bool), StructuringElement("disk", 2))
    assert not out.any()


def test_paste_single_pixel_radius_zero():
    m = np.zeros((5, 5), bool)
    m[2, 3] = True
    out = motion_paste(AverageFlow(1, 1, 1), m, StructuringElement("disk", 0))
    assert np.count_nonzero(np.any(out != 0, axis=2)) == 1
    np.testing.assert_array_equal(out[2, 3], [1, 1])


def test_paste_support_is_dilated_disk():
    m = np.zeros((16, 16), bool)
    m[8, 8] = True
    out = motion_paste(AverageFlow(3, 0, 1), m, StructuringElement("disk", 2))
    support = np.any(out != 0, axis=2)
    np.testing.assert_array_equal(support, naive_dilate(m, disk_offsets(2)))
    assert support.sum() == 13


def test_compose_empty_mask_returns_source(rng):
    src = rng.normal(size=(8, 8, 2)).astype(np.float32)
    empty = np.zeros((8, 8), bool)
    out = compose_flow(src, motion_paste(AverageFlow(1, 2, 1), empty, StructuringElement()), empty,
                       StructuringElement())
    assert out.tobytes() == src.tobytes()


def test_compose_constant_source_unchanged(rng):
    src = np.broadcast_to(np.float32([0.75, -1.5]), (10, 10, 2)).copy()
    m = rng.random((10, 10)) < 0.2
    se = StructuringElement("disk", 1)
    avg = average_flow(src, np.ones((10, 10), bool))
    out = compose_flow(src, motion_paste(avg, m, se), m, se)
    np.testing.assert_array_equal(out, src)


def test_compose_matches_branch_oracle(rng):
    src = rng.normal(size=(16, 16, 2)).astype(np.float32)
    m = rng.random((16, 16)) < 0.1
    se = StructuringElement("disk", 2)
    pasted = motion_paste(AverageFlow(0.3, -0.7, 5), m, se)
    out = compose_flow(src, pasted, m, se)
    region = naive_dilate(m, disk_offsets(2))
    expected = src.copy()
    for y in range(16):
        for x in range(16):
            if region[y, x]:
                expected[y, x] = pasted[y, x]
    assert out.tobytes() == expected.tobytes()
    # support locality
    assert np.array_equal(out[~region], src[~region])


def test_pasted_region_mean_is_exact(rng):
    src = rng.normal(size=(12, 12, 2)).astype(np.float32)
    m = rng.random((12, 12)) < 0.1
    m[6, 6] = True
    se = StructuringElement("disk", 2)
    avg = average_flow(src, rng.random((12, 12)) < 0.5)
    out = compose_flow(src, motion_paste(avg, m, se), m, se)
    again = average_flow(out, dilate(m, se))
    assert (again.u_bar, again.v_bar) == (float(np.float32(avg.u_bar)), float(np.float32(avg.v_bar)))


def test_warp_zero_flow_identity():
    for m in (disk(24, 24, 12, 12, 6), Shape("rect", width=7, height=5).rasterize(24, 24, 10, 11)):
        np.testing.assert_array_equal(warp_mask(m, np.zeros((24, 24, 2), np.float32)), m)


def test_warp_integer_translation():
    m = disk(32, 32, 14, 16, 5)
    flow = np.broadcast_to(np.float32([3, -2]), (32, 32, 2)).copy()
    out = warp_mask(m, flow)
    np.testing.assert_array_equal(out, translate(m, 3, -2))
    assert out.sum() == m.sum()


def test_warp_fractional_matches_splat_oracle():
    m = np.zeros((16, 16), bool)
    m[3:13, 3:13] = True
    flow = np.broadcast_to(np.float32([0.5, 0]), (16, 16, 2)).copy()
    np.testing.assert_array_equal(warp_mask(m, flow), naive_warp_mask(m, flow))


def test_warp_drops_out_of_bounds():
    m = np.zeros((8, 8), bool)
    m[2:5, 5:8] = True
    flow = np.broadcast_to(np.float32([2, 0]), (8, 8, 2)).copy()
    out = warp_mask(m, flow)
    assert out[2:5, 7].all() and out.sum() == 3
    flow = np.broadcast_to(np.float32([20, 0]), (8, 8, 2)).copy()
    assert not warp_mask(m, flow).any()


@settings(max_examples=25, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(0, 3))
def test_constant_integer_flow_is_set_translation(dx, dy, r):
    # a square is closed under the 3x3 closing, so the translation is exact
    m = np.zeros((24, 24), bool)
    m[8:15, 9:14] = True
    se = StructuringElement("disk", r)
    src = np.zeros((24, 24, 2), np.float32)
    src[m] = (dx, dy)
    composed = compose_flow(src, motion_paste(average_flow(src, m), m, se), m, se)
    np.testing.assert_array_equal(warp_mask(m, composed), translate(m, dx, dy))


def test_stationary_scene(rng):
    m = disk(16, 16, 8, 8, 4)
    flows = [np.zeros((16, 16, 2), np.float32)]
    sim_flows, masks = simulate_motion(flows, [m, m], m, StructuringElement("disk", 2))
    np.testing.assert_array_equal(masks[1], masks[0])
    assert sim_flows[0].tobytes() == flows[0].tobytes()


def test_disk_scene_edited_into_square():
    h = w = 64
    n = 8
    masks, flows, truth = [], [], []
    start = (20.0, 20.0)
    sq = Shape("rect", width=10, height=10)
    for k in range(n):
        c = (start[0] + 2 * k, start[1] + k)
        masks.append(disk(h, w, c[0], c[1], 6))
        truth.append(sq.rasterize(w, h, *c))
    for k in range(n - 1):
        f = np.zeros((h, w, 2), np.float32)
        f[masks[k]] = (2, 1)
        flows.append(f)
    _, sim = simulate_motion(flows, masks, truth[0], StructuringElement("disk", 3))
    for k in range(n):
        assert iou(sim[k], truth[k]) >= 0.98
        np.testing.assert_array_equal(sim[k], translate(truth[0], 2 * k, k))


def test_inpainting_case_keeps_empty_masks(rng):
    flows = [rng.normal(size=(10, 10, 2)).astype(np.float32) for _ in range(4)]
    masks = [rng.random((10, 10)) < 0.3 for _ in range(5)]
    sim_flows, sim_masks = simulate_motion(flows, masks, np.zeros((10, 10), bool))
    assert all(not m.any() for m in sim_masks)
    assert all(a.tobytes() == b.tobytes() for a, b in zip(sim_flows, flows))


def test_mask_leaving_frame_becomes_empty_fixpoint():
    m = np.zeros((10, 10), bool)
    m[4:6, 7:9] = True
    flows = [np.broadcast_to(np.float32([5, 0]), (10, 10, 2)).copy() for _ in range(3)]
    sim_flows, sim_masks = simulate_motion(flows, [np.ones((10, 10), bool)] * 4, m, StructuringElement("disk", 0))
    assert not sim_masks[1].any()
    for k in (2, 3):
        assert not sim_masks[k].any()
        assert sim_flows[k - 1].tobytes() == flows[k - 1].tobytes()


def test_empty_source_mask_freezes_motion():
    m = np.zeros((12, 12), bool)
    m[4:7, 4:7] = True
    flows = [np.ones((12, 12, 2), np.float32)]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        _, sim = simulate_motion(flows, [np.zeros((12, 12), bool)] * 2, m, StructuringElement("disk", 1))
    assert any(issubclass(w.category, EmptySourceMaskWarning) for w in caught)
    np.testing.assert_array_equal(sim[1], m)


def test_length_and_dimension_checks():
    f = np.zeros((4, 4, 2), np.float32)
    m = np.zeros((4, 4), bool)
    with pytest.raises(LengthMismatch):
        simulate_motion([f, f], [m], m)
    with pytest.raises(DimensionMismatch):
        simulate_motion([f], [np.zeros((4, 5), bool)], m)


def test_matches_brute_force_pipeline(rng):
    for _ in range(10):
        h, w = rng.integers(6, 20, size=2)
        n = int(rng.integers(2, 6))
        flows = [rng.normal(scale=1.5, size=(h, w, 2)).astype(np.float32) for _ in range(n - 1)]
        masks = [rng.random((h, w)) < 0.3 for _ in range(n)]
        edited = rng.random((h, w)) < 0.2
        r = int(rng.integers(0, 3))
        ours_f, ours_m = simulate_motion(flows, masks, edited, StructuringElement("disk", r))
        ref_f, ref_m = naive_simulate_motion(flows, masks, edited, r)
        for a, b in zip(ours_m, ref_m):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(ours_f, ref_f):
            assert np.abs(a - b).max() <= 1e-6
