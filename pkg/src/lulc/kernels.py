"""Backend selection for the raster kernels.

The compiled extension is used when it imports; otherwise the numpy
implementation. Set ``LULC_PURE_PYTHON=1`` to force the fallback.
"""
import os

from lulc import _pykernels

python_backend = _pykernels
compiled_backend = None

if not os.environ.get("LULC_PURE_PYTHON"):
    try:
        from lulc import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if _impl is compiled_backend else "python"

classify_rgba = _impl.classify_rgba
rasterize_even_odd = _impl.rasterize_even_odd
aggregate_majority = _impl.aggregate_majority
aggregate_central = _impl.aggregate_central


def available_backends():
    """``{name: module}`` for every importable backend."""
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out
