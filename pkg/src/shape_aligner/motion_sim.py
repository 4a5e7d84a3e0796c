"""Edited-content flow simulation and shape propagation.

One step k of the loop:

1. average the source flow F_k over the source mask M_k,
2. paste that constant vector onto the dilated edited mask,
3. keep the source flow everywhere outside the dilated edited mask,
4. forward-warp the edited mask along the composed flow to get the next one.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import EmptySourceMaskWarning, LengthMismatch
from .mask_algebra import SQUARE_1, StructuringElement, close, dilate
from .raster_io import as_flow, as_mask, check_same_shape


@dataclass(frozen=True)
class AverageFlow:
    u_bar: float
    v_bar: float
    source_area: int

    @property
    def vector(self):
        return np.array([self.u_bar, self.v_bar], dtype=np.float32)


@dataclass
class SimulationState:
    frame_index: int
    edited_mask: np.ndarray
    simulated_flow: np.ndarray = None
    simulated_depth: np.ndarray = None


def average_flow(flow, mask):
    """Mean (u, v) of ``flow`` over the pixels of ``mask``.

    An empty mask yields zero motion with ``source_area == 0`` and an
    EmptySourceMaskWarning.
    """
    flow, mask = as_flow(flow), as_mask(mask)
    check_same_shape(flow, mask, what="flow and mask")
    n = int(np.count_nonzero(mask))
    if n == 0:
        warnings.warn("source mask is empty; using zero motion for this step", EmptySourceMaskWarning, stacklevel=2)
        return AverageFlow(0.0, 0.0, 0)
    sel = flow[mask].astype(np.float64)
    return AverageFlow(float(sel[:, 0].sum() / n), float(sel[:, 1].sum() / n), n)


def motion_paste(avg, edited_mask, se, dilated=None):
    edited_mask = as_mask(edited_mask)
    region = dilate(edited_mask, se) if dilated is None else dilated
    out = np.zeros(edited_mask.shape + (2,), dtype=np.float32)
    out[region] = avg.vector
    return out


def compose_flow(source_flow, pasted, edited_mask, se, dilated=None):
    """Source flow outside the dilated edited mask, pasted flow inside it."""
    source_flow, pasted, edited_mask = as_flow(source_flow), as_flow(pasted), as_mask(edited_mask)
    check_same_shape(source_flow, pasted, edited_mask, what="flows and mask")
    region = dilate(edited_mask, se) if dilated is None else dilated
    out = source_flow.copy()
    out[region] = pasted[region]
    return out


def warp_mask(mask, flow):
    """Forward-splat a binary mask along ``flow``.

    Splatted bilinear weights are clamped to [0, 1], thresholded at 0.5 and
    cleaned with a 3x3 closing. Weight landing off-grid is dropped.
    """
    mask, flow = as_mask(mask), as_flow(flow)
    check_same_shape(mask, flow, what="mask and flow")
    if not mask.any():
        return mask.copy()
    active = np.ascontiguousarray(mask, dtype=np.uint8)
    weights, _ = kernels.splat(flow, active, np.ones(mask.shape, dtype=np.float64))
    hit = np.clip(np.asarray(weights), 0.0, 1.0) >= 0.5
    return close(hit, SQUARE_1)


def simulate_step(flow, source_mask, edited_mask, se):
    """Run one step; returns (simulated flow, next edited mask)."""
    if not edited_mask.any():
        # nothing to paste: source flow passes through, the mask stays empty
        return flow.copy(), edited_mask.copy()
    avg = average_flow(flow, source_mask)
    region = dilate(edited_mask, se)
    pasted = motion_paste(avg, edited_mask, se, dilated=region)
    composed = compose_flow(flow, pasted, edited_mask, se, dilated=region)
    return composed, warp_mask(edited_mask, composed)


def simulate_motion(flows, masks, edited_mask_1, se=None):
    """Propagate the first edited mask through the sequence.

    ``flows`` holds the N-1 source flows, ``masks`` at least N-1 source masks.
    Returns ``(sim_flows, edited_masks)`` of lengths N-1 and N.
    """
    se = StructuringElement() if se is None else se
    flows = [as_flow(f) for f in flows]
    masks = [as_mask(m) for m in masks]
    edited = as_mask(edited_mask_1)
    if not flows:
        raise LengthMismatch("need at least one flow (N >= 2)")
    if len(masks) < len(flows):
        raise LengthMismatch(f"{len(flows)} flows need at least {len(flows)} masks, got {len(masks)}")
    check_same_shape(edited, *flows, *masks, what="flows and masks")

    sim_flows, edited_masks = [], [edited.copy()]
    for flow, source_mask in zip(flows, masks):
        composed, edited = simulate_step(flow, source_mask, edited, se)
        sim_flows.append(composed)
        edited_masks.append(edited)
    return sim_flows, edited_masks
