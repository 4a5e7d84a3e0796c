"""Warping error and mask-sequence IoU."""
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, LengthMismatch
from .mask_algebra import iou
from .raster_io import as_flow, as_mask, check_same_shape


@dataclass
class MetricReport:
    metric: str
    per_frame: list
    mean: float
    valid_fraction: float
    # slots for values merged in by external tools (e.g. perceptual scores)
    external: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "metric": self.metric,
            "per_frame": [float(v) for v in self.per_frame],
            "mean": float(self.mean),
            "valid_fraction": float(self.valid_fraction),
            "external": dict(self.external),
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _as_color(frame):
    frame = np.asarray(frame)
    if frame.ndim != 3:
        raise DimensionMismatch(f"frame must be (H, W, C), got {frame.shape}")
    if frame.dtype == np.uint8:
        return frame.astype(np.float64) / 255.0
    return frame.astype(np.float64)


def bilinear_sample(image, x, y):
    """Sample (H, W, C) ``image`` at float coordinates; all points must be in range."""
    height, width = image.shape[:2]
    x0 = np.clip(np.floor(x).astype(np.int64), 0, width - 1)
    y0 = np.clip(np.floor(y).astype(np.int64), 0, height - 1)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx = (x - x0)[:, None]
    fy = (y - y0)[:, None]
    top = image[y0, x0] * (1 - fx) + image[y0, x1] * fx
    bottom = image[y1, x0] * (1 - fx) + image[y1, x1] * fx
    return top * (1 - fy) + bottom * fy


def warping_error(frames, flows):
    """Mean L1 colour residual between frame k and frame k+1 warped back along F_k.

    Colours are scaled to [0, 1] (uint8 input is divided by 255) and the L1
    distance is averaged over channels. Pixels whose target p + F(p) falls
    outside the frame are excluded.
    """
    frames = [_as_color(f) for f in frames]
    flows = [as_flow(f) for f in flows]
    if len(frames) < 2 or len(flows) != len(frames) - 1:
        raise LengthMismatch(f"{len(frames)} frames need {max(len(frames) - 1, 1)} flows, got {len(flows)}")
    check_same_shape(*frames, *flows, what="frames and flows")
    height, width = frames[0].shape[:2]
    ys, xs = np.mgrid[0:height, 0:width]
    per_frame, valid_total = [], 0
    for k, flow in enumerate(flows):
        tx = xs + flow[..., 0].astype(np.float64)
        ty = ys + flow[..., 1].astype(np.float64)
        valid = (tx >= 0) & (tx <= width - 1) & (ty >= 0) & (ty <= height - 1)
        n_valid = int(np.count_nonzero(valid))
        valid_total += n_valid
        if n_valid == 0:
            per_frame.append(0.0)
            continue
        warped = bilinear_sample(frames[k + 1], tx[valid], ty[valid])
        residual = np.abs(warped - frames[k][valid]).mean(axis=1)
        per_frame.append(float(residual.mean()))
    return MetricReport(
        "warping_error",
        per_frame,
        float(np.mean(per_frame)),
        valid_total / float(len(flows) * height * width),
    )


def mask_sequence_iou(predicted, truth):
    if len(predicted) != len(truth):
        raise LengthMismatch(f"{len(predicted)} predicted masks vs {len(truth)} truth masks")
    if not predicted:
        raise LengthMismatch("empty mask sequences")
    predicted = [as_mask(m) for m in predicted]
    truth = [as_mask(m) for m in truth]
    check_same_shape(*predicted, *truth, what="masks")
    per_frame = [iou(p, t) for p, t in zip(predicted, truth)]
    return MetricReport("mask_iou", per_frame, float(np.mean(per_frame)), 1.0)
