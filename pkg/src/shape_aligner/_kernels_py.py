"""Pure-Python/numpy kernels.

Reference behaviour for ``_kernels.pyx``. Both backends perform the same
floating-point operations in the same order, so their outputs are
bit-identical; ``tests/test_backends.py`` checks this.
"""
import numpy as np

NAME = "python"


def dilate(mask, offsets):
    """OR of ``mask`` shifted by every (dy, dx) in ``offsets``, clipped to the grid.

    mask: uint8 (H, W); offsets: int64 (K, 2). Returns uint8 (H, W).
    """
    height, width = mask.shape
    src = mask.astype(bool)
    out = np.zeros((height, width), dtype=bool)
    for dy, dx in offsets:
        dy, dx = int(dy), int(dx)
        if abs(dy) >= height or abs(dx) >= width:
            continue
        # out[y + dy, x + dx] |= src[y, x]
        oy0, oy1 = max(dy, 0), height + min(dy, 0)
        ox0, ox1 = max(dx, 0), width + min(dx, 0)
        out[oy0:oy1, ox0:ox1] |= src[oy0 - dy : oy1 - dy, ox0 - dx : ox1 - dx]
    return out.astype(np.uint8)


def splat(flow, active, values):
    """Forward bilinear splat of ``values`` at active pixels along ``flow``.

    Each active pixel (y, x) lands at (x + u, y + v) and deposits bilinear
    weights on the four surrounding integer pixels; corners outside the grid
    are dropped. Returns ``(weight_sum, value_sum)``, both float64 (H, W).
    Accumulation runs in row-major source order, corners in the order
    (x0, y0), (x0 + 1, y0), (x0, y0 + 1), (x0 + 1, y0 + 1).
    """
    height, width = active.shape
    ys, xs = np.nonzero(active)
    u = flow[ys, xs, 0].astype(np.float64)
    v = flow[ys, xs, 1].astype(np.float64)
    val = values[ys, xs].astype(np.float64)
    tx = xs.astype(np.float64) + u
    ty = ys.astype(np.float64) + v
    x0 = np.floor(tx)
    y0 = np.floor(ty)
    fx = tx - x0
    fy = ty - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)
    gx = 1.0 - fx
    gy = 1.0 - fy
    cx = np.stack([x0, x0 + 1, x0, x0 + 1], axis=1).ravel()
    cy = np.stack([y0, y0, y0 + 1, y0 + 1], axis=1).ravel()
    cw = np.stack([gx * gy, fx * gy, gx * fy, fx * fy], axis=1).ravel()
    cv = cw * np.repeat(val, 4)
    keep = (cx >= 0) & (cx < width) & (cy >= 0) & (cy < height)
    flat = cy[keep] * width + cx[keep]
    weights = np.zeros(height * width)
    accum = np.zeros(height * width)
    # np.add.at is unbuffered and applies updates in index order
    np.add.at(weights, flat, cw[keep])
    np.add.at(accum, flat, cv[keep])
    return weights.reshape(height, width), accum.reshape(height, width)


def gauss_seidel(values, unknowns, neighbors, tol, max_iter):
    """In-place Gauss-Seidel sweeps of the 5-point Laplace equation.

    values: float64 flat grid, modified in place. unknowns: int64 flat indices
    in sweep order. neighbors: int64 (M, 4) flat neighbour indices, -1 where
    the neighbour is off-grid. Each sweep sets every unknown to the mean of its
    on-grid neighbours and stops once the largest change is <= tol.
    Returns ``(iterations, history)`` with the max change of every sweep.
    """
    grid = values.tolist()
    plan = [
        (int(idx), [int(n) for n in nbrs if n >= 0])
        for idx, nbrs in zip(unknowns, neighbors)
    ]
    plan = [(idx, nbrs, float(len(nbrs))) for idx, nbrs in plan if nbrs]
    history = []
    for _ in range(max_iter):
        worst = 0.0
        for idx, nbrs, count in plan:
            total = 0.0
            for n in nbrs:
                total += grid[n]
            new = total / count
            change = abs(new - grid[idx])
            if change > worst:
                worst = change
            grid[idx] = new
        history.append(worst)
        if worst <= tol:
            break
    values[:] = grid
    return len(history), np.asarray(history, dtype=np.float64)
