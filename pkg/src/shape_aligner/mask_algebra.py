"""Binary morphology and mask/field algebra."""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._backend import kernels
from .errors import DimensionMismatch
from .raster_io import as_mask, check_same_shape

SHAPES = ("disk", "square")


@dataclass(frozen=True)
class StructuringElement:
    """Flat structuring element centred on the origin.

    ``disk`` covers offsets with dx**2 + dy**2 <= radius**2, ``square`` covers
    max(|dx|, |dy|) <= radius. Radius 0 is the identity for dilation.
    """

    shape: str = "disk"
    radius: int = 11

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"structuring element shape must be one of {SHAPES}, got {self.shape!r}")
        if int(self.radius) != self.radius or self.radius < 0:
            raise ValueError(f"radius must be a non-negative integer, got {self.radius!r}")

    def offsets(self):
        return _offsets(self.shape, int(self.radius))


@lru_cache(maxsize=64)
def _offsets(shape, radius):
    r = np.arange(-radius, radius + 1)
    dy, dx = np.meshgrid(r, r, indexing="ij")
    if shape == "disk":
        keep = dx * dx + dy * dy <= radius * radius
    else:
        keep = np.ones_like(dx, dtype=bool)
    out = np.stack([dy[keep], dx[keep]], axis=1).astype(np.int64)
    out.setflags(write=False)
    return out


SQUARE_1 = StructuringElement("square", 1)


def dilate(mask, se):
    mask = as_mask(mask)
    if se.radius == 0:
        return mask.copy()
    out = kernels.dilate(np.ascontiguousarray(mask, dtype=np.uint8), np.ascontiguousarray(se.offsets()))
    return np.asarray(out).astype(bool)


def erode(mask, se):
    # complement . dilate . complement; off-grid pixels count as foreground.
    # Valid as the dual only for symmetric elements, which disk and square are.
    return ~dilate(~as_mask(mask), se)


def close(mask, se=SQUARE_1):
    return erode(dilate(mask, se), se)


def hadamard(field, weights):
    field = np.asarray(field)
    weights = np.asarray(weights)
    if field.shape[:2] != weights.shape[:2] or weights.ndim != 2:
        raise DimensionMismatch(f"field {field.shape} and weights {weights.shape} differ in (H, W)")
    w = weights.astype(field.dtype)
    if field.ndim == 3:
        w = w[:, :, None]
    return field * w


def complement(mask):
    return ~as_mask(mask)


def intersect(a, b):
    a, b = as_mask(a), as_mask(b)
    check_same_shape(a, b, what="masks")
    return a & b


def union(a, b):
    a, b = as_mask(a), as_mask(b)
    check_same_shape(a, b, what="masks")
    return a | b


def difference(a, b):
    """Pixels of ``a`` not in ``b``, i.e. (1 - b) * a."""
    a, b = as_mask(a), as_mask(b)
    check_same_shape(a, b, what="masks")
    return a & ~b


def area(mask):
    return int(np.count_nonzero(as_mask(mask)))


def iou(a, b):
    a, b = as_mask(a), as_mask(b)
    check_same_shape(a, b, what="masks")
    union_area = np.count_nonzero(a | b)
    if union_area == 0:
        return 1.0
    return float(np.count_nonzero(a & b)) / float(union_area)


def translate(mask, dx, dy):
    """Integer set-translation by (dx, dy); pixels leaving the grid are dropped."""
    mask = as_mask(mask)
    height, width = mask.shape
    out = np.zeros_like(mask)
    if abs(dx) >= width or abs(dy) >= height:
        return out
    oy0, oy1 = max(dy, 0), height + min(dy, 0)
    ox0, ox1 = max(dx, 0), width + min(dx, 0)
    out[oy0:oy1, ox0:ox1] = mask[oy0 - dy : oy1 - dy, ox0 - dx : ox1 - dx]
    return out


def centroid(mask):
    """(x, y) centroid of pixel centres, or None for an empty mask."""
    ys, xs = np.nonzero(as_mask(mask))
    if xs.size == 0:
        return None
    return float(xs.mean()) + 0.5, float(ys.mean()) + 0.5
