"""Shape-guided depth repair.

Pasting the mean object depth onto the edited shape leaves the original
object's depth behind wherever the old object is not covered by the new
shape. This module marks those pixels (dilated) as a repair region and
refills them with a harmonic extension of the surrounding depth: the discrete
Laplace equation solved by Gauss-Seidel with Dirichlet data from the known
pixels around the hole.

Pixels of the edited shape are never written. During the solve they are
treated as unknowns too, so the pasted object depth cannot leak into the
repaired background as boundary data; their solved values are discarded.
"""
import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ._backend import kernels
from .errors import LengthMismatch, NoBoundary, NonConvergenceWarning, ShapeDriftWarning
from .mask_algebra import StructuringElement, centroid, difference, dilate, iou, translate
from .raster_io import as_depth, as_mask, check_same_shape

_CROSS = ndimage.generate_binary_structure(2, 1)


class MaskConvention(str, enum.Enum):
    ZERO_INSIDE = "zero-inside-repair"
    ZERO_OUTSIDE = "zero-outside-repair"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            names = ", ".join(c.value for c in cls)
            raise ValueError(f"unknown mask convention {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-4
    max_iterations: int = 10_000
    convention: MaskConvention = MaskConvention.ZERO_INSIDE

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be a positive integer, got {self.max_iterations}")
        object.__setattr__(self, "convention", MaskConvention.parse(self.convention))


@dataclass
class RefinementInputs:
    masked_depth: np.ndarray
    repair_mask: np.ndarray
    shape_guide: np.ndarray
    edited_mask: np.ndarray
    protected_depth: np.ndarray

    @property
    def fill_region(self):
        return self.repair_mask & ~self.edited_mask


@dataclass
class HarmonicSolution:
    values: np.ndarray
    domain: np.ndarray
    iterations: int
    residual: float
    history: np.ndarray
    converged: bool


def prepare_refinement_inputs(source_mask, edited_mask, simulated_depth, shape_guide, se=None,
                              convention=MaskConvention.ZERO_INSIDE):
    """Repair mask ``dilate(M - M_hat)`` and the masked depth map.

    ``zero-inside-repair`` keeps depth outside the repair mask and zeroes it
    inside; ``zero-outside-repair`` does the opposite.
    """
    se = StructuringElement() if se is None else se
    source_mask, edited_mask = as_mask(source_mask), as_mask(edited_mask)
    shape_guide, depth = as_mask(shape_guide), as_depth(simulated_depth)
    check_same_shape(source_mask, edited_mask, shape_guide, depth, what="refinement inputs")
    repair = dilate(difference(source_mask, edited_mask), se)
    keep = ~repair if MaskConvention.parse(convention) is MaskConvention.ZERO_INSIDE else repair
    masked = np.where(keep, depth, np.float32(0)).astype(np.float32)
    protected = np.where(edited_mask, depth, np.float32(0)).astype(np.float32)
    return RefinementInputs(masked, repair, shape_guide, edited_mask, protected)


def _neighbour_table(flat_idx, height, width):
    y, x = np.divmod(flat_idx, width)
    up = np.where(y > 0, flat_idx - width, -1)
    left = np.where(x > 0, flat_idx - 1, -1)
    right = np.where(x < width - 1, flat_idx + 1, -1)
    down = np.where(y < height - 1, flat_idx + width, -1)
    return np.ascontiguousarray(np.stack([up, left, right, down], axis=1), dtype=np.int64)


def solve_harmonic(base, domain, tolerance=1e-4, max_iterations=10_000):
    """Solve the 5-point Laplace equation on ``domain`` with Dirichlet data from ``base``.

    Pixels outside ``domain`` are fixed. Off-grid neighbours are left out of
    the stencil. Each connected component of ``domain`` starts from the mean
    of its boundary values, clipped to their range, so every iterate obeys
    the discrete maximum principle. Sweeps are row-major.

    Raises NoBoundary if a component has no known neighbour.
    """
    base = np.asarray(base, dtype=np.float64)
    domain = as_mask(domain)
    height, width = domain.shape
    values = base.copy()
    if not domain.any():
        return HarmonicSolution(values, domain, 0, 0.0, np.zeros(0), True)

    labels, n_comp = ndimage.label(domain, structure=_CROSS)
    for comp in range(1, n_comp + 1):
        region = labels == comp
        ring = ndimage.binary_dilation(region, structure=_CROSS) & ~domain
        if not ring.any():
            raise NoBoundary("repair region covers the whole frame; no known depth to fill from")
        ring_vals = base[ring]
        lo, hi = ring_vals.min(), ring_vals.max()
        values[region] = min(max(ring_vals.mean(), lo), hi)

    unknowns = np.flatnonzero(domain).astype(np.int64)
    neighbours = _neighbour_table(unknowns, height, width)
    flat = np.ascontiguousarray(values.ravel())
    iterations, history = kernels.gauss_seidel(flat, unknowns, neighbours, float(tolerance), int(max_iterations))
    history = np.asarray(history)
    residual = float(history[-1]) if len(history) else 0.0
    return HarmonicSolution(flat.reshape(height, width), domain, int(iterations), residual,
                            history, residual <= tolerance)


def solve_domain(inputs):
    """Fill region plus the edited-shape pixels connected to it."""
    fill = inputs.fill_region
    joint = fill | inputs.edited_mask
    labels, _ = ndimage.label(joint, structure=_CROSS)
    touching = np.unique(labels[fill])
    return np.isin(labels, touching[touching > 0])


def refine_depth(inputs, cfg=None, return_solution=False):
    """Refined depth map: harmonic fill on the repair region, edited shape kept.

    Outside the fill region the result equals ``masked_depth`` with the
    edited-shape values restored from ``protected_depth``. Emits a
    NonConvergenceWarning (and still returns) if the tolerance is not reached.
    """
    cfg = SolverConfig() if cfg is None else cfg
    fill = inputs.fill_region
    out = inputs.masked_depth.copy()
    out[inputs.edited_mask] = inputs.protected_depth[inputs.edited_mask]
    if not fill.any():
        solution = HarmonicSolution(out.astype(np.float64), fill, 0, 0.0, np.zeros(0), True)
        return (out, solution) if return_solution else out

    solution = solve_harmonic(out, solve_domain(inputs), cfg.tolerance, cfg.max_iterations)
    if not solution.converged:
        warnings.warn(
            NonConvergenceWarning(
                f"harmonic fill stopped after {solution.iterations} sweeps with max update "
                f"{solution.residual:.3g} > tolerance {cfg.tolerance:g}",
                residual=solution.residual,
                iterations=solution.iterations,
            ),
            stacklevel=2,
        )
    out[fill] = solution.values[fill].astype(np.float32)
    return (out, solution) if return_solution else out


def check_shape_drift(edited_mask, shape_guide, threshold=0.2):
    """IoU of the edited mask against the first-frame shape moved onto its centroid."""
    c_now, c_ref = centroid(edited_mask), centroid(shape_guide)
    if c_now is None or c_ref is None:
        return None
    dx = int(round(c_now[0] - c_ref[0]))
    dy = int(round(c_now[1] - c_ref[1]))
    score = iou(edited_mask, translate(shape_guide, dx, dy))
    if score < threshold:
        warnings.warn(f"edited mask drifted from the first-frame shape (IoU {score:.3f} < {threshold})",
                      ShapeDriftWarning, stacklevel=2)
    return score


def refine_sequence(simulated_depths, masks, edited_masks, shape_guide, cfg=None, se=None):
    """Repair every simulated depth map; returns the refined maps."""
    cfg = SolverConfig() if cfg is None else cfg
    se = StructuringElement() if se is None else se
    if not (len(simulated_depths) == len(masks) == len(edited_masks)):
        raise LengthMismatch(
            f"got {len(simulated_depths)} depths, {len(masks)} masks, {len(edited_masks)} edited masks")
    out = []
    for depth, mask, edited in zip(simulated_depths, masks, edited_masks):
        check_shape_drift(edited, shape_guide)
        inputs = prepare_refinement_inputs(mask, edited, depth, shape_guide, se, cfg.convention)
        out.append(refine_depth(inputs, cfg))
    return out
