"""Edited-video depth simulation by average-depth pasting.

Four strategies are selectable:

``source-depth``      source depth maps unchanged
``pasted-depth``      per-frame mean object depth pasted onto the edited mask
``warp-first-depth``  first pasted map forward-warped along the source flows
``refined-depth``     ``pasted-depth`` output, repaired later by depth_refine
"""
import enum
import warnings

import numpy as np

from ._backend import kernels
from .errors import EmptySourceMaskWarning, LengthMismatch
from .raster_io import as_depth, as_flow, as_mask, check_same_shape


class DepthStrategy(str, enum.Enum):
    SOURCE = "source-depth"
    PASTED = "pasted-depth"
    WARP_FIRST = "warp-first-depth"
    REFINED = "refined-depth"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown depth strategy {value!r} (expected one of {names})") from None


def average_depth(depth, mask, fallback=None):
    """Mean depth over ``mask``; ``fallback`` when the mask is empty."""
    depth, mask = as_depth(depth), as_mask(mask)
    check_same_shape(depth, mask, what="depth and mask")
    n = int(np.count_nonzero(mask))
    if n == 0:
        return fallback
    return float(depth[mask].astype(np.float64).sum() / n)


def depth_paste(d_bar, edited_mask):
    edited_mask = as_mask(edited_mask)
    out = np.zeros(edited_mask.shape, dtype=np.float32)
    out[edited_mask] = np.float32(d_bar)
    return out


def compose_depth(source_depth, d_bar, edited_mask):
    source_depth, edited_mask = as_depth(source_depth), as_mask(edited_mask)
    check_same_shape(source_depth, edited_mask, what="depth and mask")
    return np.where(edited_mask, np.float32(d_bar), source_depth).astype(np.float32)


def carried_average_depths(depths, masks):
    """Per-frame mean object depth with carry-forward over empty masks.

    Frames before the first non-empty mask take that frame's value. Returns
    None when no frame has a non-empty mask.
    """
    raw = [average_depth(d, m) for d, m in zip(depths, masks)]
    first = next((v for v in raw if v is not None), None)
    if first is None:
        return None
    out, last = [], first
    for v in raw:
        if v is None:
            warnings.warn("source mask is empty; carrying the previous mean depth forward",
                          EmptySourceMaskWarning, stacklevel=2)
        else:
            last = v
        out.append(last)
    return out


def warp_depth(depth, flow, fill):
    """Forward-splat ``depth`` along ``flow``; uncovered pixels take ``fill``."""
    depth = as_depth(depth)
    active = np.ones(depth.shape, dtype=np.uint8)
    weights, accum = kernels.splat(as_flow(flow), active, depth.astype(np.float64))
    weights, accum = np.asarray(weights), np.asarray(accum)
    covered = weights > 0
    out = np.asarray(fill, dtype=np.float64).copy()
    out[covered] = accum[covered] / weights[covered]
    return out.astype(np.float32)


def simulate_depth(depths, masks, edited_masks, strategy, flows=None):
    """Simulated depth maps D-hat for all N frames under ``strategy``.

    For ``refined-depth`` this returns the pasted maps; the repair itself is
    ``depth_refine.refine_sequence``.
    """
    strategy = DepthStrategy.parse(strategy)
    depths = [as_depth(d) for d in depths]
    n = len(depths)
    if strategy is DepthStrategy.SOURCE:
        return [d.copy() for d in depths]

    masks = [as_mask(m) for m in masks]
    edited_masks = [as_mask(m) for m in edited_masks]
    if len(masks) != n or len(edited_masks) != n:
        raise LengthMismatch(f"need {n} source and edited masks, got {len(masks)} and {len(edited_masks)}")
    check_same_shape(*depths, *masks, *edited_masks, what="depths and masks")

    d_bars = carried_average_depths(depths, masks)
    if d_bars is None:
        warnings.warn("no frame has a non-empty source mask; falling back to source depth",
                      EmptySourceMaskWarning, stacklevel=2)
        return [d.copy() for d in depths]

    if strategy is DepthStrategy.WARP_FIRST:
        flows = [] if flows is None else [as_flow(f) for f in flows]
        if len(flows) != n - 1:
            raise LengthMismatch(f"warp-first-depth needs {n - 1} flows, got {len(flows)}")
        check_same_shape(depths[0], *flows, what="depths and flows")
        out = [compose_depth(depths[0], d_bars[0], edited_masks[0])]
        for k, flow in enumerate(flows):
            out.append(warp_depth(out[-1], flow, depths[k + 1]))
        return out

    return [compose_depth(d, b, m) for d, b, m in zip(depths, d_bars, edited_masks)]
