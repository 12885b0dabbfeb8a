"""Select the compiled kernels when available, else the numpy fallback.

Set ``REGDELOC_PURE=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
impl = _pykernels

if os.environ.get("REGDELOC_PURE") != "1":
    try:
        from . import _ckernels as impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        impl = _pykernels


def bfs_girth(nbrs, limit):
    return int(impl.bfs_girth(nbrs, int(limit)))


def shared_edge_cycle_length(nbrs, limit):
    return int(impl.shared_edge_cycle_length(nbrs, int(limit)))


def chebyshev_sweep(nbrs, scale, v, coeffs):
    return impl.chebyshev_sweep(nbrs, float(scale), v, coeffs)
