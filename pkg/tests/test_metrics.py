import json
from pathlib import Path

import numpy as np
import pytest

from oracles import naive_warping_error
from shape_aligner.errors import LengthMismatch
from shape_aligner.mask_algebra import translate
from shape_aligner.metrics import mask_sequence_iou, warping_error

GOLDEN = json.loads((Path(__file__).parent / "golden" / "warping_error.json").read_text())


def test_static_zero(rng):
    f = rng.integers(0, 256, size=(10, 12, 3)).astype(np.uint8)
    rep = warping_error([f, f, f], [np.zeros((10, 12, 2), np.float32)] * 2)
    assert rep.per_frame == [0.0, 0.0] and rep.mean == 0.0 and rep.valid_fraction == 1.0


def test_integer_translation_zero(rng):
    a = rng.integers(0, 256, size=(16, 16, 3)).astype(np.uint8)
    b = np.zeros_like(a)
    b[:, 3:] = a[:, :-3]
    flow = np.broadcast_to(np.float32([3, 0]), (16, 16, 2)).copy()
    rep = warping_error([a, b], [flow])
    assert rep.mean == 0.0
    assert rep.valid_fraction == pytest.approx(13 / 16)


def test_matches_naive_oracle(rng):
    frames = [rng.integers(0, 256, size=(9, 11, 3)).astype(np.uint8) for _ in range(3)]
    flows = [rng.normal(scale=2, size=(9, 11, 2)).astype(np.float32) for _ in range(2)]
    rep = warping_error(frames, flows)
    np.testing.assert_allclose(rep.per_frame, naive_warping_error(frames, flows), rtol=1e-12, atol=1e-15)


def test_scaling_homogeneity(rng):
    frames = [rng.random((8, 8, 3)) for _ in range(3)]
    flows = [rng.normal(size=(8, 8, 2)).astype(np.float32) for _ in range(2)]
    base = warping_error(frames, flows).mean
    assert base >= 0
    assert warping_error([f * 0.5 for f in frames], flows).mean == 0.5 * base
    assert warping_error([f * 0.3 for f in frames], flows).mean == pytest.approx(0.3 * base, rel=1e-12)


def test_synthetic_scene_against_golden(standard_scene):
    rep = warping_error(standard_scene.frames, standard_scene.flows)
    assert rep.mean <= GOLDEN["mean"] * 1.1
    assert rep.mean <= 0.02
    np.testing.assert_allclose(rep.per_frame, GOLDEN["per_frame"], rtol=1e-9)


def test_we_length_check():
    f = np.zeros((4, 4, 3), np.uint8)
    with pytest.raises(LengthMismatch):
        warping_error([f, f], [])


def test_iou_sequences(rng):
    masks = [rng.random((8, 8)) < 0.5 for _ in range(4)]
    assert mask_sequence_iou(masks, masks).per_frame == [1.0] * 4
    other = list(masks)
    m = np.zeros((8, 8), bool)
    m[:4] = True
    masks[2] = m
    other[2] = translate(m, 0, 4)
    rep = mask_sequence_iou(masks, other)
    assert rep.per_frame[2] == 0.0 and rep.mean == pytest.approx(3 / 4)
    with pytest.raises(LengthMismatch):
        mask_sequence_iou(masks, masks[:2])


def test_report_json(tmp_path):
    m = [np.ones((2, 2), bool)]
    rep = mask_sequence_iou(m, m)
    rep.save(tmp_path / "r.json")
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["metric"] == "mask_iou" and doc["per_frame"] == [1.0] and doc["mean"] == 1.0
    assert doc["valid_fraction"] == 1.0
