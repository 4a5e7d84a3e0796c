"""Grid conventions and file codecs for flow, depth, mask and frame assets.

In memory every per-frame field is a plain numpy array in row-major
(height, width) layout:

* flow  -- ``float32`` of shape (H, W, 2), channel 0 = u (+right), 1 = v (+down)
* mask  -- ``bool`` of shape (H, W)
* depth -- ``float32`` of shape (H, W), relative and unitless
* frame -- ``uint8`` of shape (H, W, 3)

On disk: Middlebury ``.flo`` for flow, grayscale PFM for depth, 8-bit PNG for
masks and frames.
"""
import json
import struct

import numpy as np
from PIL import Image

from .errors import (
    BadHeader,
    BadMagic,
    DimensionMismatch,
    NonFiniteValue,
    TruncatedFile,
    UnsupportedBitDepth,
)

FLO_MAGIC = 202021.25
_FLO_HEADER = struct.Struct("<fii")


def as_flow(flow):
    flow = np.asarray(flow)
    if flow.ndim != 3 or flow.shape[2] != 2 or flow.shape[0] < 1 or flow.shape[1] < 1:
        raise DimensionMismatch(f"flow must have shape (H, W, 2), got {flow.shape}")
    return np.ascontiguousarray(flow, dtype=np.float32)


def as_mask(mask):
    mask = np.asarray(mask)
    if mask.ndim != 2 or mask.shape[0] < 1 or mask.shape[1] < 1:
        raise DimensionMismatch(f"mask must have shape (H, W), got {mask.shape}")
    if mask.dtype != np.bool_:
        if not np.isin(mask, (0, 1)).all():
            raise ValueError("mask values must be 0 or 1")
        mask = mask.astype(bool)
    return np.ascontiguousarray(mask)


def as_depth(depth):
    depth = np.asarray(depth)
    if depth.ndim != 2 or depth.shape[0] < 1 or depth.shape[1] < 1:
        raise DimensionMismatch(f"depth must have shape (H, W), got {depth.shape}")
    return np.ascontiguousarray(depth, dtype=np.float32)


def check_same_shape(*grids, what="grids"):
    """Raise DimensionMismatch unless all grids share (H, W)."""
    shapes = {tuple(g.shape[:2]) for g in grids}
    if len(shapes) > 1:
        raise DimensionMismatch(f"{what} have mismatched dimensions: {sorted(shapes)}")


def _check_finite(arr, path):
    if not np.isfinite(arr).all():
        raise NonFiniteValue(f"{path}: non-finite value")


# -- flow ---------------------------------------------------------------------


def read_flow(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _FLO_HEADER.size:
        raise TruncatedFile(f"{path}: {len(raw)} bytes is shorter than the .flo header")
    magic, width, height = _FLO_HEADER.unpack_from(raw)
    if magic != FLO_MAGIC:
        raise BadMagic(f"{path}: magic {magic!r} != {FLO_MAGIC}")
    if width < 1 or height < 1:
        raise BadHeader(f"{path}: invalid dimensions {width}x{height}")
    expected = _FLO_HEADER.size + width * height * 2 * 4
    if len(raw) < expected:
        raise TruncatedFile(f"{path}: expected {expected} bytes, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", count=width * height * 2, offset=_FLO_HEADER.size)
    flow = data.reshape(height, width, 2).astype(np.float32)
    _check_finite(flow, path)
    return flow


def write_flow(flow, path):
    flow = as_flow(flow)
    _check_finite(flow, path)
    height, width = flow.shape[:2]
    with open(path, "wb") as fh:
        fh.write(_FLO_HEADER.pack(FLO_MAGIC, width, height))
        fh.write(flow.astype("<f4").tobytes())


# -- depth (PFM) --------------------------------------------------------------


def _read_token(raw, pos):
    while pos < len(raw) and raw[pos : pos + 1].isspace():
        pos += 1
    start = pos
    while pos < len(raw) and not raw[pos : pos + 1].isspace():
        pos += 1
    return raw[start:pos], pos


def read_depth(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    tag, pos = _read_token(raw, 0)
    if tag != b"Pf":
        raise BadHeader(f"{path}: expected grayscale PFM tag 'Pf', got {tag[:8]!r}")
    try:
        w_tok, pos = _read_token(raw, pos)
        h_tok, pos = _read_token(raw, pos)
        s_tok, pos = _read_token(raw, pos)
        width, height, scale = int(w_tok), int(h_tok), float(s_tok)
    except ValueError as exc:
        raise BadHeader(f"{path}: malformed PFM header") from exc
    if width < 1 or height < 1 or scale == 0 or not np.isfinite(scale):
        raise BadHeader(f"{path}: invalid PFM header values")
    pos += 1  # single whitespace byte ends the header
    dtype = "<f4" if scale < 0 else ">f4"
    count = width * height
    if len(raw) - pos < count * 4:
        raise TruncatedFile(f"{path}: expected {count * 4} payload bytes, got {len(raw) - pos}")
    data = np.frombuffer(raw, dtype=dtype, count=count, offset=pos)
    # PFM stores rows bottom-to-top
    depth = data.reshape(height, width)[::-1].astype(np.float32)
    _check_finite(depth, path)
    return np.ascontiguousarray(depth)


def write_depth(depth, path):
    depth = as_depth(depth)
    _check_finite(depth, path)
    height, width = depth.shape
    with open(path, "wb") as fh:
        fh.write(f"Pf\n{width} {height}\n-1.0\n".encode("ascii"))
        fh.write(np.ascontiguousarray(depth[::-1]).astype("<f4").tobytes())


def write_depth_png16(depth, path):
    """Export depth as a min-max normalized 16-bit PNG plus a JSON sidecar.

    The sidecar (``<path>.json``) records ``min`` and ``max`` so the linear
    mapping can be undone. Lossy; the PFM file remains the pipeline format.
    """
    depth = as_depth(depth)
    lo, hi = float(depth.min()), float(depth.max())
    span = hi - lo
    if span > 0:
        scaled = np.round((depth.astype(np.float64) - lo) / span * 65535.0)
    else:
        scaled = np.zeros(depth.shape)
    Image.fromarray(scaled.astype(np.uint16)).save(path)
    with open(str(path) + ".json", "w") as fh:
        json.dump({"min": lo, "max": hi}, fh, sort_keys=True)


def read_depth_png16(path):
    with Image.open(path) as img:
        arr = np.asarray(img).astype(np.float64)
    with open(str(path) + ".json") as fh:
        meta = json.load(fh)
    return (meta["min"] + arr / 65535.0 * (meta["max"] - meta["min"])).astype(np.float32)


# -- masks and frames ---------------------------------------------------------


def read_mask(path):
    with Image.open(path) as img:
        if img.mode != "L":
            raise UnsupportedBitDepth(f"{path}: mask must be 8-bit single channel, got mode {img.mode}")
        arr = np.asarray(img)
    return arr >= 128


def write_mask(mask, path):
    mask = as_mask(mask)
    Image.fromarray(mask.astype(np.uint8) * 255).save(path)


def read_frame(path):
    with Image.open(path) as img:
        if img.mode != "RGB":
            raise UnsupportedBitDepth(f"{path}: frame must be 8-bit RGB, got mode {img.mode}")
        return np.asarray(img).copy()


def write_frame(frame, path):
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3 or frame.dtype != np.uint8:
        raise DimensionMismatch(f"frame must be uint8 (H, W, 3), got {frame.dtype} {frame.shape}")
    Image.fromarray(np.ascontiguousarray(frame)).save(path)

