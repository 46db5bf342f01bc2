"""The compiled kernels and the fallback must agree."""
import numpy as np
import pytest

from awtstat import _pykernels
from awtstat._backend import BACKEND

try:
    from awtstat import _ckernels
except ImportError:
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def test_backend_name():
    assert BACKEND in ("cython", "python")


@needs_ext
def test_elementwise_kernels_agree(rng):
    x = np.concatenate([[0.0], rng.uniform(0, 40, 500), rng.uniform(40, 1e5, 50)])
    for nu in (0, 1):
        np.testing.assert_allclose(_ckernels.bessel_ie(x, nu), _pykernels.bessel_ie(x, nu), rtol=1e-14)
    xp = x[1:]
    np.testing.assert_allclose(_ckernels.bessel_k0e(xp), _pykernels.bessel_k0e(xp), rtol=1e-14)
    z = rng.uniform(0, 1 - 1e-9, 500)
    for c in (1, 2):
        np.testing.assert_allclose(_ckernels.hyp2f1_33c(c, z), _pykernels.hyp2f1_33c(c, z), rtol=1e-13)
    for k in (0, 1, 5, 60):
        np.testing.assert_allclose(_ckernels.laguerre(k, x[:100]), _pykernels.laguerre(k, x[:100]),
                                   rtol=1e-11, atol=1e-11)


@needs_ext
def test_marching_segments_agree(rng):
    f = rng.standard_normal((40, 55))
    for level in (-0.5, 0.0, 0.7):
        a = _ckernels.marching_segments(f, level)
        b = _pykernels.marching_segments(f, level)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])
        np.testing.assert_allclose(a[2], b[2], rtol=0, atol=1e-15)


@pytest.mark.parametrize("mod", [pytest.param(_pykernels, id="python"),
                                 pytest.param(_ckernels, id="cython", marks=needs_ext)])
def test_saddle_cells(mod):
    # corners (i,j), (i,j+1), (i+1,j+1), (i+1,j): high-low-high-low is code 5
    f = np.array([[1.0, 0.0], [0.0, 1.0]])
    hi_centre = mod.marching_segments(f, 0.4)   # centre 0.5 > level
    lo_centre = mod.marching_segments(f, 0.6)
    assert hi_centre[0].size == 2 and lo_centre[0].size == 2
    pair = lambda r: sorted(tuple(sorted(p)) for p in zip(r[0].tolist(), r[1].tolist()))  # noqa: E731
    assert pair(hi_centre) != pair(lo_centre)
    # high centre: the low corners are cut off, so each segment touches a low corner's edges
    # bottom edge id 0, top edge id 1, left edge id 2, right edge id 3
    assert pair(hi_centre) == [(0, 3), (1, 2)]
    assert pair(lo_centre) == [(0, 2), (1, 3)]
