# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts and operation order as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()

NAME = "cython"


def dilate(const cnp.uint8_t[:, ::1] mask, const cnp.int64_t[:, ::1] offsets):
    cdef Py_ssize_t height = mask.shape[0], width = mask.shape[1]
    cdef Py_ssize_t n_off = offsets.shape[0]
    out_arr = np.zeros((height, width), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t y, x, k, ty, tx
    for y in range(height):
        for x in range(width):
            if mask[y, x] == 0:
                continue
            for k in range(n_off):
                ty = y + offsets[k, 0]
                tx = x + offsets[k, 1]
                if 0 <= ty < height and 0 <= tx < width:
                    out[ty, tx] = 1
    return out_arr


def splat(const cnp.float32_t[:, :, ::1] flow,
          const cnp.uint8_t[:, ::1] active,
          const cnp.float64_t[:, ::1] values):
    cdef Py_ssize_t height = active.shape[0], width = active.shape[1]
    weights_arr = np.zeros((height, width), dtype=np.float64)
    accum_arr = np.zeros((height, width), dtype=np.float64)
    cdef cnp.float64_t[:, ::1] weights = weights_arr
    cdef cnp.float64_t[:, ::1] accum = accum_arr
    cdef Py_ssize_t y, x, c, cx, cy
    cdef cnp.int64_t x0, y0
    cdef double tx, ty, fx, fy, gx, gy, val, w
    cdef double cw[4]
    cdef cnp.int64_t ox[4]
    cdef cnp.int64_t oy[4]
    ox[0] = 0; ox[1] = 1; ox[2] = 0; ox[3] = 1
    oy[0] = 0; oy[1] = 0; oy[2] = 1; oy[3] = 1
    for y in range(height):
        for x in range(width):
            if active[y, x] == 0:
                continue
            tx = <double>x + <double>flow[y, x, 0]
            ty = <double>y + <double>flow[y, x, 1]
            val = values[y, x]
            x0 = <cnp.int64_t>floor(tx)
            y0 = <cnp.int64_t>floor(ty)
            fx = tx - floor(tx)
            fy = ty - floor(ty)
            gx = 1.0 - fx
            gy = 1.0 - fy
            cw[0] = gx * gy
            cw[1] = fx * gy
            cw[2] = gx * fy
            cw[3] = fx * fy
            for c in range(4):
                cx = x0 + ox[c]
                cy = y0 + oy[c]
                if 0 <= cx < width and 0 <= cy < height:
                    w = cw[c]
                    weights[cy, cx] += w
                    accum[cy, cx] += w * val
    return weights_arr, accum_arr


def gauss_seidel(cnp.float64_t[::1] values,
                 const cnp.int64_t[::1] unknowns,
                 const cnp.int64_t[:, ::1] neighbors,
                 double tol, Py_ssize_t max_iter):
    cdef Py_ssize_t m = unknowns.shape[0]
    cdef Py_ssize_t it, i, j, idx, count
    cdef cnp.int64_t nb
    cdef double total, new, change, worst
    history = np.zeros(max_iter, dtype=np.float64)
    cdef cnp.float64_t[::1] hist = history
    cdef Py_ssize_t done = 0
    for it in range(max_iter):
        worst = 0.0
        for i in range(m):
            idx = unknowns[i]
            total = 0.0
            count = 0
            for j in range(4):
                nb = neighbors[i, j]
                if nb >= 0:
                    total += values[nb]
                    count += 1
            if count == 0:
                continue
            new = total / <double>count
            change = fabs(new - values[idx])
            if change > worst:
                worst = change
            values[idx] = new
        hist[it] = worst
        done = it + 1
        if worst <= tol:
            break
    return done, history[:done].copy()
