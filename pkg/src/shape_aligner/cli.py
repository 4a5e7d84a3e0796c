"""Command-line interface.

Exit codes: 0 success, 2 validation error, 3 runtime error, 4 non-convergence
escalated by ``--strict``. Failures print one JSON line on stderr:
``{"error": <category>, "message": <text>}``.
"""
import argparse
import glob
import json
import os
import sys

from .depth_sim import DepthStrategy
from .depth_refine import MaskConvention
from .errors import IsaError, LengthMismatch, MissingAsset, SchemaError
from .metrics import mask_sequence_iou, warping_error
from .pipeline import load_manifest, run_isa
from .raster_io import read_flow, read_frame, read_mask
from .synth import export_scene, generate_scene, load_scene_spec


def _sorted_files(directory, pattern):
    if not os.path.isdir(directory):
        raise MissingAsset(f"not a directory: {directory}")
    paths = sorted(glob.glob(os.path.join(directory, pattern)))
    if not paths:
        raise MissingAsset(f"no {pattern} files in {directory}")
    return paths


def cmd_simulate(args):
    manifest = load_manifest(args.manifest).with_overrides(
        strategy=args.strategy, dilation_radius=args.dilation_radius, mask_convention=args.mask_convention)
    result = run_isa(manifest, args.out, intermediates=not args.no_intermediates, strict=args.strict)
    print(json.dumps(result.summary(), sort_keys=True))
    return 0


def cmd_synth(args):
    spec = load_scene_spec(args.spec)
    if os.path.exists(args.out) and os.listdir(args.out):
        raise SchemaError(f"output directory {args.out} exists and is not empty", field="out")
    manifest = export_scene(generate_scene(spec), args.out)
    print(json.dumps({"manifest": os.path.join(args.out, "manifest.json"), "n_frames": manifest["n_frames"]}))
    return 0


def cmd_metrics_we(args):
    frames = [read_frame(p) for p in _sorted_files(args.frames, "*.png")]
    flows = [read_flow(p) for p in _sorted_files(args.flows, "*.flo")]
    report = warping_error(frames, flows)
    report.save(args.report)
    print(json.dumps({"metric": report.metric, "mean": report.mean}))
    return 0


def cmd_metrics_iou(args):
    pred = _sorted_files(args.pred, "*.png")
    truth = _sorted_files(args.truth, "*.png")
    if len(pred) != len(truth):
        raise LengthMismatch(f"{len(pred)} predicted masks vs {len(truth)} truth masks")
    report = mask_sequence_iou([read_mask(p) for p in pred], [read_mask(p) for p in truth])
    report.save(args.report)
    print(json.dumps({"metric": report.metric, "mean": report.mean}))
    return 0


def cmd_inspect(args):
    m = load_manifest(args.manifest)
    print(json.dumps({
        "valid": True,
        "n_frames": m.n_frames,
        "size": [m.width, m.height],
        "strategy": m.strategy.value,
        "morphology": {"shape": m.morphology.shape, "radius": m.morphology.radius},
    }, sort_keys=True))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="shape-aligner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the full pipeline on a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--strategy", choices=[s.value for s in DepthStrategy])
    p.add_argument("--dilation-radius", type=int)
    p.add_argument("--mask-convention", choices=[c.value for c in MaskConvention])
    p.add_argument("--no-intermediates", action="store_true",
                   help="write only edited masks and final depths")
    p.add_argument("--strict", action="store_true", help="treat solver non-convergence as an error (exit 4)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth", help="generate and export a synthetic scene")
    p.add_argument("--spec", required=True, help="preset name or scene spec JSON file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("metrics", help="compute sequence metrics")
    msub = p.add_subparsers(dest="metric", required=True)
    q = msub.add_parser("we", help="warping error")
    q.add_argument("--frames", required=True)
    q.add_argument("--flows", required=True)
    q.add_argument("--report", required=True)
    q.set_defaults(func=cmd_metrics_we)
    q = msub.add_parser("iou", help="per-frame mask IoU")
    q.add_argument("--pred", required=True)
    q.add_argument("--truth", required=True)
    q.add_argument("--report", required=True)
    q.set_defaults(func=cmd_metrics_iou)

    p = sub.add_parser("inspect", help="validate a manifest without running")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_inspect)
    return parser


def _fail(category, message, code):
    sys.stderr.write(json.dumps({"error": category, "message": message}) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IsaError as exc:
        return _fail(exc.category, str(exc), exc.exit_code)
    except ValueError as exc:
        return _fail("validation", str(exc), 2)
    except OSError as exc:
        return _fail("io", str(exc), 3)


if __name__ == "__main__":
    sys.exit(main())
