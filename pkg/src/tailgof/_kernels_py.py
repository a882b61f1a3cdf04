"""Pure numpy implementations of the hot kernels (fallback backend)."""

import numpy as np


def bin_cells(ix, iy, vals, nx, ny):
    """Sum the rows of ``vals`` (shape ``(n, c)``) into cells ``(ix, iy)``."""
    vals = np.asarray(vals, dtype=float)
    c = vals.shape[1]
    flat = np.asarray(ix, dtype=np.intp) * ny + np.asarray(iy, dtype=np.intp)
    out = np.empty((nx * ny, c))
    for j in range(c):
        out[:, j] = np.bincount(flat, weights=vals[:, j], minlength=nx * ny)
    return out.reshape(nx, ny, c)


def field_statistics(field, mesh):
    """``(max |W|, h^2 sum W^2, h^2 sum W^2 / ((x - delta)(y - delta)))``.

    ``field[i, j]`` is the value at node ``(delta + (i+1) h, delta + (j+1) h)``.
    """
    field = np.asarray(field, dtype=float)
    nx, ny = field.shape
    sq = field * field
    wi = 1.0 / np.arange(1, nx + 1)
    wj = 1.0 / np.arange(1, ny + 1)
    kappa = float(np.max(np.abs(field))) if field.size else 0.0
    omega2 = float(mesh * mesh * sq.sum())
    a2 = float(wi @ sq @ wj)
    return kappa, omega2, a2


def sheet_path_statistics(increments, mesh):
    """Cumulate cell increments into a sheet and return its statistics."""
    field = np.cumsum(np.cumsum(increments, axis=0), axis=1)
    return field_statistics(field, mesh)
