"""Kernel dispatch: compiled extension when available, NumPy otherwise.

Set ``LRTHERMAL_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _fallback

try:
    if os.environ.get("LRTHERMAL_PURE_PYTHON"):
        raise ImportError("pure-python mode requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def slogpfaffian(a, backend=None):
    """Return ``(phase, logabs)`` of the Pfaffian of a complex skew matrix (copied)."""
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    if _use_compiled(backend):
        return _compiled.slogpfaffian(a)
    return _fallback.slogpfaffian(a)


def pair_power_sum(xa, xb, exponent, metric=0, backend=None):
    xa = np.ascontiguousarray(xa, dtype=np.float64)
    xb = np.ascontiguousarray(xb, dtype=np.float64)
    if _use_compiled(backend):
        return _compiled.pair_power_sum(xa, xb, float(exponent), int(metric))
    return _fallback.pair_power_sum(xa, xb, float(exponent), int(metric))


def _use_compiled(backend):
    if backend is None:
        return _compiled is not None
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return True
    if backend == "python":
        return False
    raise ValueError(f"unknown backend {backend!r}")
