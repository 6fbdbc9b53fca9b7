"""Backend selection for the maximal partial-sum sweeps.

The compiled extension ``charmax._ckernels`` is used when it was built;
otherwise the numpy implementation in ``charmax._pykernels`` is used.
Setting ``CHARMAX_PURE_PYTHON=1`` forces the numpy path.

Both kernels return ``(maxima, argmax)`` where ``maxima[i]`` is the largest
modulus of a prefix sum at evaluation point ``i`` and ``argmax[i]`` is the
0-based position of the *smallest* prefix attaining it.
"""
import os
from functools import lru_cache

import numpy as np

from . import _pykernels

if os.environ.get("CHARMAX_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"


@lru_cache(maxsize=64)
def roots_of_unity(modulus):
    """Table ``e(j / modulus)`` for ``j = 0 .. modulus-1`` (read-only)."""
    j = np.arange(modulus, dtype=np.float64)
    roots = np.exp(2j * np.pi * (j / modulus))
    roots.setflags(write=False)
    return roots


def max_partial_phase(coef, freq, points, modulus, backend=None):
    """Sweep ``sum_{n<=l} coef[n] * e(freq[n] * x / modulus)`` over points ``x``."""
    impl = _select(backend)
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    freq = np.ascontiguousarray(np.asarray(freq, dtype=np.int64) % modulus)
    points = np.ascontiguousarray(points, dtype=np.int64)
    return impl.max_partial_phase(coef, freq, points, int(modulus), roots_of_unity(int(modulus)))


def max_partial_table(coef, table, backend=None):
    """Sweep ``sum_{n<=l} coef[n] * table[x, n]`` over the rows ``x`` of ``table``."""
    impl = _select(backend)
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    table = np.ascontiguousarray(table, dtype=np.complex128)
    return impl.max_partial_table(coef, table)


def _select(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")
