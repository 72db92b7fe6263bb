"""Backend selection for the 2x2 kernels.

The compiled extension is used when importable; the pure-Python module
is the fallback. Setting ``SL2ORBIT_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _pykernels

_ext = None
if not os.environ.get("SL2ORBIT_PURE_PYTHON"):
    try:
        from . import _kernels as _ext
    except ImportError:
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
_impl = _ext if _ext is not None else _pykernels


def available_backends():
    """Names of the backends that can be used in this process."""
    return ["cython", "python"] if _ext is not None else ["python"]


def get_backend(name=None):
    """Module implementing the kernel API for ``name`` (default: active one)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython" and _ext is not None:
        return _ext
    raise ValueError(f"backend {name!r} not available")


def _prep(mats):
    return np.ascontiguousarray(mats, dtype=complex)


def _prep_idx(idx):
    return np.ascontiguousarray(idx, dtype=np.int_)


def chain_product(mats, idx):
    return _impl.chain_product(_prep(mats), _prep_idx(idx))


def chain_traces(mats, idx, offsets):
    return _impl.chain_traces(_prep(mats), _prep_idx(idx), _prep_idx(offsets))


def lex_traces(mats):
    return _impl.lex_traces(_prep(mats))


def conjugate_all(g, ginv, mats):
    return _impl.conjugate_all(_prep(g), _prep(ginv), _prep(mats))
