# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scanline fill kernel; mirrors _scanline_py.fill_mask exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


def fill_mask(
    cnp.ndarray[cnp.float64_t, ndim=1] x0,
    cnp.ndarray[cnp.float64_t, ndim=1] y0,
    cnp.ndarray[cnp.float64_t, ndim=1] x1,
    cnp.ndarray[cnp.float64_t, ndim=1] y1,
    int resolution,
):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] mask = np.zeros(
        (resolution, resolution), dtype=np.uint8
    )
    cdef Py_ssize_t n = x0.shape[0]
    if n == 0:
        return mask
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs_buf = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] sign_buf = np.empty(n, dtype=np.int8)
    cdef Py_ssize_t row, e, k, col
    cdef double py, px, t
    cdef int winding
    for row in range(resolution):
        py = row + 0.5
        k = 0
        for e in range(n):
            if y0[e] <= py < y1[e]:
                t = (py - y0[e]) / (y1[e] - y0[e])
                xs_buf[k] = x0[e] + t * (x1[e] - x0[e])
                sign_buf[k] = 1
                k += 1
            elif y1[e] <= py < y0[e]:
                t = (py - y0[e]) / (y1[e] - y0[e])
                xs_buf[k] = x0[e] + t * (x1[e] - x0[e])
                sign_buf[k] = -1
                k += 1
        if k == 0:
            continue
        for col in range(resolution):
            px = col + 0.5
            winding = 0
            for e in range(k):
                if xs_buf[e] > px:
                    winding += sign_buf[e]
            if winding != 0:
                mask[row, col] = 1
    return mask
