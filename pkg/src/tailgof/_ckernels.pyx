# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_kernels_py`` for semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def bin_cells(ix, iy, vals, Py_ssize_t nx, Py_ssize_t ny):
    cdef cnp.intp_t[::1] cx = np.ascontiguousarray(ix, dtype=np.intp)
    cdef cnp.intp_t[::1] cy = np.ascontiguousarray(iy, dtype=np.intp)
    cdef double[:, ::1] v = np.ascontiguousarray(vals, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], c = v.shape[1], p, j
    out_arr = np.zeros((nx, ny, c))
    cdef double[:, :, ::1] out = out_arr
    for p in range(n):
        for j in range(c):
            out[cx[p], cy[p], j] += v[p, j]
    return out_arr


cdef tuple _stats(double[:, ::1] w, double mesh):
    cdef Py_ssize_t nx = w.shape[0], ny = w.shape[1], i, j
    cdef double kappa = 0.0, s2 = 0.0, a2 = 0.0, row_sq, row_wt, val, sq
    inv_arr = 1.0 / np.arange(1, ny + 1, dtype=np.float64)
    cdef double[::1] inv = inv_arr
    for i in range(nx):
        row_sq = 0.0
        row_wt = 0.0
        for j in range(ny):
            val = w[i, j]
            sq = val * val
            if fabs(val) > kappa:
                kappa = fabs(val)
            row_sq += sq
            row_wt += sq * inv[j]
        s2 += row_sq
        a2 += row_wt / (i + 1)
    return kappa, mesh * mesh * s2, a2


def field_statistics(field, double mesh):
    cdef double[:, ::1] w = np.ascontiguousarray(field, dtype=np.float64)
    return _stats(w, mesh)


def sheet_path_statistics(increments, double mesh):
    """Cumulates in a private copy, then reduces in one pass."""
    cdef double[:, ::1] w = np.array(increments, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t nx = w.shape[0], ny = w.shape[1], i, j
    cdef double acc
    for i in range(nx):
        acc = 0.0
        for j in range(ny):
            acc += w[i, j]
            w[i, j] = acc
            if i > 0:
                w[i, j] += w[i - 1, j]
    return _stats(w, mesh)
