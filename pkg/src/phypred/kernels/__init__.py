"""Spatial convolution kernels with a compiled core and a numpy fallback.

The backend is chosen once at import.  ``PHYPRED_KERNELS`` forces a choice
("cython" or "python"); otherwise the compiled extension is used when it
imported cleanly.  1x1 convolutions are pure matrix products and always go
through BLAS regardless of backend.  ``benchmarks/bench_kernels.py``
compares the two paths on model-shaped workloads.
"""

import os

import numpy as np

from . import _numpy_backend as _np_impl

_requested = os.environ.get("PHYPRED_KERNELS", "auto").lower()
_cy_impl = None
if _requested in ("auto", "cython"):
    try:
        from . import _ckernels as _cy_impl  # compiled at install time
    except ImportError:
        _cy_impl = None
        if _requested == "cython":
            raise ImportError(
                "PHYPRED_KERNELS=cython but the compiled extension is not "
                "available; rebuild with `pip install -e . --no-build-isolation`"
            )

_impl = _cy_impl if _cy_impl is not None else _np_impl
BACKEND = "cython" if _cy_impl is not None else "python"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def conv2d_forward(x, w, ph, pw):
    if w.shape[2] == 1 and w.shape[3] == 1 and ph == 0 and pw == 0:
        return _np_impl.conv1x1_forward(x, w)
    return np.asarray(_impl.conv2d_forward(_c(x), _c(w), ph, pw))


def conv2d_backward_input(gy, w, ph, pw, x_shape):
    if w.shape[2] == 1 and w.shape[3] == 1 and ph == 0 and pw == 0:
        return _np_impl.conv1x1_backward_input(gy, w)
    return np.asarray(_impl.conv2d_backward_input(_c(gy), _c(w), ph, pw,
                                                  x_shape[2], x_shape[3]))


def conv2d_backward_weight(gy, x, ph, pw, w_shape):
    if w_shape[2] == 1 and w_shape[3] == 1 and ph == 0 and pw == 0:
        return _np_impl.conv1x1_backward_weight(gy, x)
    return np.asarray(_impl.conv2d_backward_weight(_c(gy), _c(x), ph, pw,
                                                   w_shape[2], w_shape[3]))
