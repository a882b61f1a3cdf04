import numpy as np
import pytest
from numpy.testing import assert_allclose

from tailgof import _kernels_py, kernels

ckernels = pytest.importorskip("tailgof._ckernels")


def test_dispatch_reports_backend():
    assert kernels.BACKEND in ("cython", "python")


def test_bin_cells_agree(rng):
    n, nx, ny = 5000, 37, 23
    ix, iy = rng.integers(0, nx, n), rng.integers(0, ny, n)
    vals = rng.normal(size=(n, 4))
    a = _kernels_py.bin_cells(ix, iy, vals, nx, ny)
    b = ckernels.bin_cells(ix, iy, vals, nx, ny)
    assert b.shape == (nx, ny, 4)
    assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_bin_cells_oracle(rng):
    ix, iy = np.array([0, 1, 1, 0]), np.array([2, 0, 0, 2])
    vals = np.array([[1.0], [2.0], [3.0], [4.0]])
    for impl in (_kernels_py, ckernels):
        out = impl.bin_cells(ix, iy, vals, 2, 3)
        assert out[0, 2, 0] == 5.0 and out[1, 0, 0] == 5.0 and out.sum() == 10.0


@pytest.mark.parametrize("shape", [(1, 1), (7, 3), (200, 200)])
def test_statistics_agree(rng, shape):
    field = rng.normal(size=shape)
    a = _kernels_py.field_statistics(field, 0.005)
    b = ckernels.field_statistics(field, 0.005)
    assert_allclose(a, b, rtol=1e-12)
    inc = rng.normal(size=shape) * 0.005
    assert_allclose(_kernels_py.sheet_path_statistics(inc, 0.005),
                    ckernels.sheet_path_statistics(inc, 0.005), rtol=1e-10)


def test_pure_python_switch():
    import subprocess
    import sys
    code = "from tailgof import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={"TAILGOF_PURE_PYTHON": "1", "PATH": ""},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
