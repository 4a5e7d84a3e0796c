"""Analytic synthetic scenes with exact flows, masks, depths and edited ground truth.

A single object translates at constant velocity over a static background
whose depth is a plane ``a + b * x / W + c * y / H`` (x, y integer pixel
indices). Pixel (x, y) belongs to a shape iff its centre (x + 0.5, y + 0.5)
lies inside the continuous shape.
"""
import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import SpecInvalid
from .raster_io import write_depth, write_flow, write_frame, write_mask

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class Shape:
    kind: str  # "disk", "rect" or "none"
    radius: float = 0.0
    width: float = 0.0
    height: float = 0.0

    def __post_init__(self):
        if self.kind not in ("disk", "rect", "none"):
            raise SpecInvalid(f"unknown shape kind {self.kind!r}")
        if self.kind == "disk" and not self.radius > 0:
            raise SpecInvalid("disk radius must be > 0")
        if self.kind == "rect" and not (self.width > 0 and self.height > 0):
            raise SpecInvalid("rect width and height must be > 0")

    def half_extent(self):
        if self.kind == "disk":
            return self.radius, self.radius
        if self.kind == "rect":
            return self.width / 2.0, self.height / 2.0
        return 0.0, 0.0

    def rasterize(self, width, height, cx, cy):
        px = np.arange(width) + 0.5
        py = np.arange(height) + 0.5
        dx = px[None, :] - cx
        dy = py[:, None] - cy
        if self.kind == "disk":
            return dx * dx + dy * dy <= self.radius * self.radius
        if self.kind == "rect":
            return (np.abs(dx) <= self.width / 2.0) & (np.abs(dy) <= self.height / 2.0)
        return np.zeros((height, width), dtype=bool)

    @classmethod
    def from_dict(cls, d):
        if d is None:
            return cls("none")
        return cls(**d)


@dataclass(frozen=True)
class SceneSpec:
    width: int = 64
    height: int = 64
    n_frames: int = 16
    object_shape: Shape = Shape("disk", radius=8.0)
    start_center: tuple = (16.0, 20.0)
    velocity: tuple = (2.0, 1.0)
    object_depth: float = 0.2
    background_plane: tuple = (0.8, 0.05, 0.04)
    edited_shape: Shape = Shape("rect", width=14.0, height=14.0)
    texture: dict = field(default_factory=lambda: {"kind": "checkerboard", "cell": 4})
    seed: int = 0
    allow_exit: bool = False
    dilation_radius: int = 2
    strategy: str = "refined-depth"

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise SpecInvalid("width and height must be >= 1")
        if self.n_frames < 2:
            raise SpecInvalid("n_frames must be >= 2")
        if self.texture.get("kind") not in ("checkerboard", "flat"):
            raise SpecInvalid(f"unknown texture {self.texture!r}")
        if self.object_shape.kind == "none":
            raise SpecInvalid("the source object needs a shape")
        if not self.allow_exit:
            for k in range(self.n_frames):
                cx, cy = self.center(k)
                for shape in (self.object_shape, self.edited_shape):
                    hx, hy = shape.half_extent()
                    if shape.kind != "none" and (
                        cx - hx < 1 or cy - hy < 1 or cx + hx > self.width - 1 or cy + hy > self.height - 1
                    ):
                        raise SpecInvalid(f"{shape.kind} leaves the frame at frame {k + 1} (set allow_exit)")

    def center(self, k):
        """Shape centre at 0-based frame index k."""
        return (self.start_center[0] + k * self.velocity[0], self.start_center[1] + k * self.velocity[1])

    def background(self):
        a, b, c = self.background_plane
        x = np.arange(self.width, dtype=np.float64)[None, :]
        y = np.arange(self.height, dtype=np.float64)[:, None]
        return (a + b * x / self.width + c * y / self.height).astype(np.float32)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("object_shape", "edited_shape"):
            if key in d:
                d[key] = Shape.from_dict(d[key])
        for key in ("start_center", "velocity", "background_plane"):
            if key in d:
                d[key] = tuple(float(v) for v in d[key])
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise SpecInvalid(f"unknown scene spec fields: {sorted(unknown)}")
        return cls(**d)


PRESETS = {
    # disk object edited into a square that both overhangs and undercuts it
    "standard": SceneSpec(),
    # edited square entirely inside the original disk: leftover object depth
    "shrunken": SceneSpec(object_shape=Shape("disk", radius=10.0), start_center=(20.0, 22.0),
                          velocity=(1.0, 1.0), edited_shape=Shape("rect", width=8.0, height=8.0)),
    # object removed: the edited mask is empty
    "inpainting": SceneSpec(edited_shape=Shape("none")),
    "static": SceneSpec(velocity=(0.0, 0.0), n_frames=4),
}


def load_scene_spec(spec):
    """A SceneSpec from a preset name, a JSON file path, or a dict."""
    if isinstance(spec, SceneSpec):
        return spec
    if isinstance(spec, dict):
        return SceneSpec.from_dict(spec)
    if spec in PRESETS:
        return PRESETS[spec]
    if not os.path.exists(spec):
        raise SpecInvalid(f"{spec!r} is neither a preset ({', '.join(PRESETS)}) nor a file")
    with open(spec) as fh:
        d = json.load(fh)
    base = d.pop("preset", None)
    if base is not None:
        if base not in PRESETS:
            raise SpecInvalid(f"unknown preset {base!r}")
        merged = PRESETS[base].to_dict()
        merged.update(d)
        d = merged
    return SceneSpec.from_dict(d)


@dataclass
class SceneBundle:
    spec: SceneSpec
    frames: list
    flows: list
    masks: list
    depths: list
    edited_masks: list
    edited_depths: list
    edited_frames: list
    background_depth: np.ndarray


def _palette(spec):
    rng = np.random.default_rng(spec.seed)
    object_colors = rng.integers(40, 216, size=(2, 3)).astype(np.uint8)
    edited_colors = rng.integers(40, 216, size=(2, 3)).astype(np.uint8)
    return object_colors, edited_colors


def _texture(spec, colors, origin):
    """Two-colour checkerboard (or flat first colour) anchored at ``origin``."""
    h, w = spec.height, spec.width
    if spec.texture["kind"] == "flat":
        return np.broadcast_to(colors[0], (h, w, 3)).copy()
    cell = int(spec.texture.get("cell", 4))
    x = np.floor((np.arange(w) - origin[0]) / cell).astype(np.int64)
    y = np.floor((np.arange(h) - origin[1]) / cell).astype(np.int64)
    parity = (x[None, :] + y[:, None]) % 2
    return colors[parity]


def generate_scene(spec):
    spec = load_scene_spec(spec)
    w, h = spec.width, spec.height
    background = spec.background()
    if spec.texture["kind"] == "flat":
        gray = int(spec.texture.get("gray", 128))
        bg_colors = np.array([[gray] * 3, [gray] * 3], dtype=np.uint8)
    else:
        bg_colors = np.array([[70, 70, 70], [180, 180, 180]], dtype=np.uint8)
    bg_frame = _texture(spec, bg_colors, (0.0, 0.0))
    obj_colors, edit_colors = _palette(spec)
    vel = np.array(spec.velocity, dtype=np.float32)

    frames, masks, depths, flows = [], [], [], []
    edited_masks, edited_depths, edited_frames = [], [], []
    for k in range(spec.n_frames):
        cx, cy = spec.center(k)
        # object texture moves with the object
        origin = (cx - spec.start_center[0], cy - spec.start_center[1])
        mask = spec.object_shape.rasterize(w, h, cx, cy)
        emask = spec.edited_shape.rasterize(w, h, cx, cy)
        frame = bg_frame.copy()
        frame[mask] = _texture(spec, obj_colors, origin)[mask]
        eframe = bg_frame.copy()
        eframe[emask] = _texture(spec, edit_colors, origin)[emask]
        masks.append(mask)
        edited_masks.append(emask)
        frames.append(frame)
        edited_frames.append(eframe)
        depths.append(np.where(mask, np.float32(spec.object_depth), background).astype(np.float32))
        edited_depths.append(np.where(emask, np.float32(spec.object_depth), background).astype(np.float32))
        if k < spec.n_frames - 1:
            flow = np.zeros((h, w, 2), dtype=np.float32)
            flow[mask] = vel
            flows.append(flow)
    return SceneBundle(spec, frames, flows, masks, depths, edited_masks, edited_depths, edited_frames, background)


def _name(k, ext):
    return f"{k:05d}{ext}"


def export_scene(bundle, out_dir):
    """Write all assets plus ``manifest.json``; returns the manifest dict.

    Layout: frames/, masks/, depths/, flows/, edited/ (first edited mask and
    frame) and truth/ (edited ground truth for every frame).
    """
    spec = bundle.spec
    sub = {name: os.path.join(out_dir, name) for name in
           ("frames", "masks", "depths", "flows", "edited", "truth/masks", "truth/depths", "truth/frames")}
    for path in sub.values():
        os.makedirs(path, exist_ok=True)

    per_frame = []
    for k in range(spec.n_frames):
        entry = {
            "frame": f"frames/{_name(k, '.png')}",
            "mask": f"masks/{_name(k, '.png')}",
            "depth": f"depths/{_name(k, '.pfm')}",
        }
        write_frame(bundle.frames[k], os.path.join(out_dir, entry["frame"]))
        write_mask(bundle.masks[k], os.path.join(out_dir, entry["mask"]))
        write_depth(bundle.depths[k], os.path.join(out_dir, entry["depth"]))
        write_mask(bundle.edited_masks[k], os.path.join(sub["truth/masks"], _name(k, ".png")))
        write_depth(bundle.edited_depths[k], os.path.join(sub["truth/depths"], _name(k, ".pfm")))
        write_frame(bundle.edited_frames[k], os.path.join(sub["truth/frames"], _name(k, ".png")))
        per_frame.append(entry)
    flow_paths = []
    for k, flow in enumerate(bundle.flows):
        rel = f"flows/{_name(k, '.flo')}"
        write_flow(flow, os.path.join(out_dir, rel))
        flow_paths.append(rel)
    write_mask(bundle.edited_masks[0], os.path.join(sub["edited"], "mask.png"))
    write_frame(bundle.edited_frames[0], os.path.join(sub["edited"], "frame.png"))
    write_depth(bundle.background_depth, os.path.join(out_dir, "truth", "background.pfm"))

    manifest = {
        "version": MANIFEST_VERSION,
        "width": spec.width,
        "height": spec.height,
        "n_frames": spec.n_frames,
        "assets": {"frames": per_frame, "flows": flow_paths},
        "edited_first_mask": "edited/mask.png",
        "edited_first_frame": "edited/frame.png",
        "prompt_text": f"synthetic scene: {spec.object_shape.kind} edited into {spec.edited_shape.kind}",
        "depth_orientation": "unspecified",
        "strategy": spec.strategy,
        "morphology": {"shape": "disk", "radius": spec.dilation_radius},
        "refine": {"tolerance": 1e-4, "max_iterations": 10000, "convention": "zero-inside-repair"},
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "scene.json"), "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest

