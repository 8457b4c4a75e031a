"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``LPBODY_BACKEND=python`` is set, the numpy versions
are used.  Both expose the same functions.
"""
import os

import numpy as np

from lpbody import _pykernels

try:
    if os.environ.get("LPBODY_BACKEND", "").lower() == "python":
        raise ImportError("python backend requested")
    from lpbody import _ckernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def weighted_rowsum(w, f):
    """Compensated ``f @ w`` for a 1-D or 2-D real array ``f``."""
    f = np.asarray(f, dtype=float)
    squeeze = f.ndim == 1
    f2 = np.ascontiguousarray(np.atleast_2d(f))
    out = _impl.weighted_rowsum(np.ascontiguousarray(w, dtype=float), f2)
    out = np.asarray(out)
    return float(out[0]) if squeeze else out


def weighted_rowsum_complex(w, f):
    f = np.asarray(f)
    if not np.iscomplexobj(f):
        return weighted_rowsum(w, f)
    return weighted_rowsum(w, f.real) + 1j * weighted_rowsum(w, f.imag)


def chord_margin(theta, rho):
    return float(_impl.chord_margin(np.ascontiguousarray(theta, dtype=float),
                                    np.ascontiguousarray(rho, dtype=float)))


def stencil_contract(samples, index, weight, strides):
    return np.asarray(_impl.stencil_contract(
        np.ascontiguousarray(samples, dtype=float),
        np.ascontiguousarray(index, dtype=np.int64),
        np.ascontiguousarray(weight, dtype=float),
        np.ascontiguousarray(strides, dtype=np.int64)))
