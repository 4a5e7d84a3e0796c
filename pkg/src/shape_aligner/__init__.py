"""Propagate an edited object's shape through a video using flow, masks and depth.

Given per-frame source flows, masks and depths plus the mask of an edited
first frame, simulate the edited video's masks, flows and depth maps, and
repair the simulated depth around the edited shape.
"""
from ._backend import BACKEND
from .depth_refine import (
    MaskConvention,
    RefinementInputs,
    SolverConfig,
    prepare_refinement_inputs,
    refine_depth,
    refine_sequence,
)
from .depth_sim import DepthStrategy, average_depth, compose_depth, depth_paste, simulate_depth
from .mask_algebra import StructuringElement, area, complement, dilate, hadamard, intersect, iou
from .metrics import MetricReport, mask_sequence_iou, warping_error
from .motion_sim import AverageFlow, average_flow, compose_flow, motion_paste, simulate_motion, warp_mask
from .pipeline import SceneManifest, load_manifest, run_isa, simulate_sequence
from .synth import SceneSpec, export_scene, generate_scene

__version__ = "0.1.0"

__all__ = [
    "area",
    "average_depth",
    "average_flow",
    "AverageFlow",
    "BACKEND",
    "complement",
    "compose_depth",
    "compose_flow",
    "depth_paste",
    "DepthStrategy",
    "dilate",
    "export_scene",
    "generate_scene",
    "hadamard",
    "intersect",
    "iou",
    "load_manifest",
    "mask_sequence_iou",
    "MaskConvention",
    "MetricReport",
    "motion_paste",
    "prepare_refinement_inputs",
    "refine_depth",
    "refine_sequence",
    "RefinementInputs",
    "run_isa",
    "SceneManifest",
    "SceneSpec",
    "simulate_depth",
    "simulate_motion",
    "simulate_sequence",
    "SolverConfig",
    "StructuringElement",
    "warp_mask",
    "warping_error",
]
