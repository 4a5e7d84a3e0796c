"""Compare the compiled and pure-Python kernel backends.

Times each kernel (dilation, forward splat, Gauss-Seidel) on the same inputs
with both backends, checks the results are bit-identical, and times the full
pipeline on a synthetic scene with each backend switched in.

    python benchmarks/bench_kernels.py --repeat 5 --size 128
"""
import argparse
import time

import numpy as np

from shape_aligner import _kernels_py, depth_refine, depth_sim, mask_algebra, motion_sim
from shape_aligner.depth_sim import DepthStrategy
from shape_aligner.mask_algebra import StructuringElement
from shape_aligner.pipeline import simulate_sequence
from shape_aligner.synth import SceneSpec, Shape, generate_scene

try:
    from shape_aligner import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    times = []
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times) * 1e3, result


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.tobytes() == b.tobytes()
    return a == b


def kernel_cases(size, rng):
    mask = (rng.random((size, size)) < 0.05).astype(np.uint8)
    offsets = np.ascontiguousarray(StructuringElement("disk", 11).offsets())
    flow = np.ascontiguousarray(rng.normal(scale=2, size=(size, size, 2)).astype(np.float32))
    active = (rng.random((size, size)) < 0.5).astype(np.uint8)
    values = rng.random((size, size))

    hole = np.zeros((size, size), bool)
    hole[size // 4: 3 * size // 4, size // 4: 3 * size // 4] = True
    unknowns = np.flatnonzero(hole).astype(np.int64)
    ys, xs = np.divmod(unknowns, size)
    nb = np.stack([(ys - 1) * size + xs, ys * size + xs - 1, ys * size + xs + 1, (ys + 1) * size + xs], axis=1)
    grid = rng.random(size * size)

    def gs(mod):
        v = grid.copy()
        return (v,) + tuple(mod.gauss_seidel(v, unknowns, nb.astype(np.int64), 1e-4, 200))

    return {
        "dilate (disk r=11)": lambda mod: mod.dilate(mask, offsets),
        "splat": lambda mod: mod.splat(flow, active, values),
        "gauss_seidel (200 sweeps max)": gs,
    }


def run_pipeline(scene, backend):
    for mod in (depth_refine, depth_sim, mask_algebra, motion_sim):
        mod.kernels = backend
    se = StructuringElement("disk", scene.spec.dilation_radius)
    return simulate_sequence(scene.flows, scene.masks, scene.depths, scene.edited_masks[0],
                             DepthStrategy.REFINED, se)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=96, help="grid side for the kernel benchmarks")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels is not None else [])
    if _kernels is None:
        print("compiled backend not built; timing the Python backend only")

    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} " + " ".join(f"{name + ' ms':>12s}" for name, _ in backends) + "   speedup  identical")
    for label, fn in kernel_cases(args.size, rng).items():
        timed = [best_of(lambda: fn(mod), args.repeat) for _, mod in backends]
        row = f"{label:32s} " + " ".join(f"{t:12.2f}" for t, _ in timed)
        if len(timed) == 2:
            row += f"   {timed[0][0] / timed[1][0]:7.1f}x  {same(timed[0][1], timed[1][1])}"
        print(row)

    scene = generate_scene(SceneSpec(object_shape=Shape("disk", radius=10), start_center=(20.0, 22.0),
                                     velocity=(1.0, 1.0), edited_shape=Shape("rect", width=8, height=8)))
    timed = [best_of(lambda: run_pipeline(scene, mod), args.repeat) for _, mod in backends]
    row = f"{'pipeline (64x64, N=16)':32s} " + " ".join(f"{t:12.2f}" for t, _ in timed)
    if len(timed) == 2:
        identical = all(same(a, b) for a, b in zip(timed[0][1].refined_depths, timed[1][1].refined_depths))
        row += f"   {timed[0][0] / timed[1][0]:7.1f}x  {identical}"
    print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
