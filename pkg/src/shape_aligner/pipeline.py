"""Manifest loading and end-to-end orchestration.

A run takes the source annotations (flows, masks, depths), the first edited
mask, and produces edited masks, simulated flows, simulated depths and the
final (refined) depths, written to an output directory that either appears
complete or not at all.
"""
import json
import os
import shutil
import tempfile
import time
import warnings
from dataclasses import dataclass, field, replace
from importlib import resources

import jsonschema
import numpy as np

from .depth_refine import MaskConvention, SolverConfig, refine_sequence
from .depth_sim import DepthStrategy, simulate_depth
from .errors import (
    DimensionMismatch,
    IsaWarning,
    LengthMismatch,
    MissingAsset,
    NonConvergence,
    NonConvergenceWarning,
    SchemaError,
    ValidationError,
)
from .mask_algebra import StructuringElement
from .motion_sim import SimulationState, simulate_motion
from .raster_io import (
    read_depth,
    read_depth_png16,
    read_flow,
    read_frame,
    read_mask,
    write_depth,
    write_flow,
    write_mask,
)


def manifest_schema():
    text = resources.files("shape_aligner").joinpath("schema/manifest.schema.json").read_text()
    return json.loads(text)


@dataclass
class SceneAssets:
    masks: list
    depths: list
    flows: list
    edited_first_mask: np.ndarray
    frames: list = None


@dataclass(frozen=True)
class SceneManifest:
    root: str
    version: int
    width: int
    height: int
    n_frames: int
    frame_paths: tuple
    mask_paths: tuple
    depth_paths: tuple
    flow_paths: tuple
    edited_first_mask: str
    edited_first_frame: str = None
    prompt_text: str = None
    depth_orientation: str = None
    strategy: DepthStrategy = DepthStrategy.REFINED
    morphology: StructuringElement = StructuringElement()
    refine: SolverConfig = SolverConfig()
    assets: SceneAssets = field(default=None, compare=False, repr=False)

    def with_overrides(self, strategy=None, dilation_radius=None, mask_convention=None):
        changes = {}
        if strategy is not None:
            changes["strategy"] = DepthStrategy.parse(strategy)
        if dilation_radius is not None:
            changes["morphology"] = StructuringElement(self.morphology.shape, int(dilation_radius))
        if mask_convention is not None:
            changes["refine"] = replace(self.refine, convention=MaskConvention.parse(mask_convention))
        return replace(self, **changes)


def _field_name(error):
    return ".".join(str(p) for p in error.absolute_path) or "<root>"


def load_manifest(path):
    """Parse, schema-check and fully validate a manifest.

    Every referenced asset is decoded and dimension-checked here, so a run
    never starts on inputs that would fail halfway through.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise MissingAsset(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from None

    validator = jsonschema.Draft202012Validator(manifest_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        name = _field_name(err)
        raise SchemaError(f"{path}: field {name}: {err.message}", field=name)

    n = doc["n_frames"]
    entries = doc["assets"]["frames"]
    flows = doc["assets"]["flows"]
    if len(entries) != n:
        raise LengthMismatch(f"n_frames is {n} but {len(entries)} frame entries are listed")
    if len(flows) != n - 1:
        raise LengthMismatch(f"n_frames is {n} so {n - 1} flows are required, got {len(flows)}")

    root = os.path.dirname(os.path.abspath(path))
    morph = doc.get("morphology", {})
    refine = doc.get("refine", {})
    frame_paths = [e.get("frame") for e in entries]
    manifest = SceneManifest(
        root=root,
        version=doc["version"],
        width=doc["width"],
        height=doc["height"],
        n_frames=n,
        frame_paths=tuple(frame_paths) if all(frame_paths) else None,
        mask_paths=tuple(e["mask"] for e in entries),
        depth_paths=tuple(e["depth"] for e in entries),
        flow_paths=tuple(flows),
        edited_first_mask=doc["edited_first_mask"],
        edited_first_frame=doc.get("edited_first_frame"),
        prompt_text=doc.get("prompt_text"),
        depth_orientation=doc.get("depth_orientation"),
        strategy=DepthStrategy.parse(doc.get("strategy", DepthStrategy.REFINED.value)),
        morphology=StructuringElement(morph.get("shape", "disk"), morph.get("radius", 11)),
        refine=SolverConfig(
            tolerance=refine.get("tolerance", 1e-4),
            max_iterations=refine.get("max_iterations", 10_000),
            convention=refine.get("convention", MaskConvention.ZERO_INSIDE.value),
        ),
    )
    return replace(manifest, assets=_load_assets(manifest))


def _read_any_depth(path):
    if path.lower().endswith(".png"):
        return read_depth_png16(path)
    return read_depth(path)


def _load_assets(m):
    def resolve(rel):
        full = os.path.join(m.root, rel)
        if not os.path.isfile(full):
            raise MissingAsset(f"missing asset: {rel}")
        return full

    expected = (m.height, m.width)

    def checked(rel, reader):
        grid = reader(resolve(rel))
        if grid.shape[:2] != expected:
            raise DimensionMismatch(f"{rel}: size {grid.shape[1]}x{grid.shape[0]}, manifest says {m.width}x{m.height}")
        return grid

    if m.edited_first_frame is not None:
        resolve(m.edited_first_frame)
    return SceneAssets(
        masks=[checked(p, read_mask) for p in m.mask_paths],
        depths=[checked(p, _read_any_depth) for p in m.depth_paths],
        flows=[checked(p, read_flow) for p in m.flow_paths],
        edited_first_mask=checked(m.edited_first_mask, read_mask),
        frames=[checked(p, read_frame) for p in m.frame_paths] if m.frame_paths else None,
    )


@dataclass
class IsaOutputs:
    edited_masks: list
    sim_flows: list
    sim_depths: list
    refined_depths: list
    warnings: list
    timings_ms: dict

    @property
    def states(self):
        n = len(self.edited_masks)
        return [
            SimulationState(k + 1, self.edited_masks[k], self.sim_flows[k] if k < n - 1 else None,
                            self.refined_depths[k])
            for k in range(n)
        ]


def simulate_sequence(flows, masks, depths, edited_mask_1, strategy=DepthStrategy.REFINED,
                      se=None, cfg=None):
    """In-memory pipeline: motion simulation, depth simulation, refinement."""
    strategy = DepthStrategy.parse(strategy)
    se = StructuringElement() if se is None else se
    cfg = SolverConfig() if cfg is None else cfg
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IsaWarning)
        t0 = time.perf_counter()
        sim_flows, edited_masks = simulate_motion(flows, masks, edited_mask_1, se)
        t1 = time.perf_counter()
        sim_depths = simulate_depth(depths, masks, edited_masks, strategy, flows)
        t2 = time.perf_counter()
        if strategy is DepthStrategy.REFINED:
            refined = refine_sequence(sim_depths, masks, edited_masks, edited_mask_1, cfg, se)
        else:
            refined = [d.copy() for d in sim_depths]
        t3 = time.perf_counter()
    timings = {"motion": (t1 - t0) * 1e3, "depth": (t2 - t1) * 1e3, "refine": (t3 - t2) * 1e3}
    messages = [w for w in caught if issubclass(w.category, IsaWarning)]
    for w in caught:
        if not issubclass(w.category, IsaWarning):
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    return IsaOutputs(edited_masks, sim_flows, sim_depths, refined, messages, timings)


@dataclass
class RunResult:
    out_dir: str
    masks: list
    flows: list
    depths: list
    refined: list
    edited_first_frame: str
    timings_ms: dict
    warnings: list

    def summary(self):
        return {
            "out_dir": self.out_dir,
            "counts": {"masks": len(self.masks), "flows": len(self.flows),
                       "depths": len(self.depths), "refined": len(self.refined)},
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
            "warnings": self.warnings,
        }


def _prepare_out_dir(out_dir):
    if os.path.exists(out_dir):
        if not os.path.isdir(out_dir) or os.listdir(out_dir):
            raise ValidationError(f"output directory {out_dir} exists and is not empty")
    parent = os.path.dirname(os.path.abspath(out_dir))
    os.makedirs(parent, exist_ok=True)
    return tempfile.mkdtemp(prefix=".isa-partial-", dir=parent)


def run_isa(manifest, out_dir, intermediates=True, strict=False):
    """Run the full pipeline for ``manifest`` and write results to ``out_dir``.

    Output layout: masks/ (edited masks), flows/ (simulated flows), depths/
    (simulated, pre-refinement depths), refined/ (final depths), the copied
    first edited frame, and run.json. With ``intermediates=False`` only
    masks/ and refined/ are written. Files are fully determined by the
    inputs; timings are reported in the returned result, not on disk.
    """
    if isinstance(manifest, (str, os.PathLike)):
        manifest = load_manifest(manifest)
    assets = manifest.assets if manifest.assets is not None else _load_assets(manifest)
    tmp = _prepare_out_dir(out_dir)
    try:
        outputs = simulate_sequence(assets.flows, assets.masks, assets.depths, assets.edited_first_mask,
                                    manifest.strategy, manifest.morphology, manifest.refine)
        warning_text = [f"{w.category.__name__}: {w.message}" for w in outputs.warnings]
        if strict and any(issubclass(w.category, NonConvergenceWarning) for w in outputs.warnings):
            raise NonConvergence("; ".join(t for t in warning_text if t.startswith("NonConvergence")))

        t0 = time.perf_counter()
        written = {"masks": [], "flows": [], "depths": [], "refined": []}

        def emit(kind, k, ext, writer, value):
            os.makedirs(os.path.join(tmp, kind), exist_ok=True)
            rel = f"{kind}/{k:05d}{ext}"
            writer(value, os.path.join(tmp, rel))
            written[kind].append(rel)

        for k, m in enumerate(outputs.edited_masks):
            emit("masks", k, ".png", write_mask, m)
        for k, d in enumerate(outputs.refined_depths):
            emit("refined", k, ".pfm", write_depth, d)
        if intermediates:
            for k, f in enumerate(outputs.sim_flows):
                emit("flows", k, ".flo", write_flow, f)
            for k, d in enumerate(outputs.sim_depths):
                emit("depths", k, ".pfm", write_depth, d)
        edited_frame = None
        if manifest.edited_first_frame is not None:
            ext = os.path.splitext(manifest.edited_first_frame)[1]
            edited_frame = f"edited_first_frame{ext}"
            shutil.copyfile(os.path.join(manifest.root, manifest.edited_first_frame), os.path.join(tmp, edited_frame))

        record = {
            "strategy": manifest.strategy.value,
            "morphology": {"shape": manifest.morphology.shape, "radius": manifest.morphology.radius},
            "refine": {"tolerance": manifest.refine.tolerance, "max_iterations": manifest.refine.max_iterations,
                       "convention": manifest.refine.convention.value},
            "n_frames": manifest.n_frames,
            "prompt_text": manifest.prompt_text,
            "depth_orientation": manifest.depth_orientation,
            "outputs": dict(written, edited_first_frame=edited_frame),
            "warnings": warning_text,
        }
        with open(os.path.join(tmp, "run.json"), "w") as fh:
            json.dump(record, fh, indent=2, sort_keys=True)
            fh.write("\n")
        timings = dict(outputs.timings_ms, write=(time.perf_counter() - t0) * 1e3)

        if os.path.isdir(out_dir):
            os.rmdir(out_dir)
        os.replace(tmp, out_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise

    def full(paths):
        return [os.path.join(out_dir, p) for p in paths]

    return RunResult(
        out_dir=out_dir,
        masks=full(written["masks"]),
        flows=full(written["flows"]),
        depths=full(written["depths"]),
        refined=full(written["refined"]),
        edited_first_frame=os.path.join(out_dir, edited_frame) if edited_frame else None,
        timings_ms=timings,
        warnings=warning_text,
    )
