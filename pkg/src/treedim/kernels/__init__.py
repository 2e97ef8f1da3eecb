"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time. Set ``TREEDIM_DISABLE_NUMBA=1``
to force the numpy path (also used automatically when numba is missing).
Both backends stay importable as ``numpy_backend`` / ``numba_backend`` so
tests and the benchmark can compare them directly.
"""
import os

from . import _numpy as numpy_backend

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - numba is an optional speedup
    numba_backend = None

_DISABLED = os.environ.get("TREEDIM_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

backend = numpy_backend if (_DISABLED or numba_backend is None) else numba_backend
BACKEND_NAME = "numpy" if backend is numpy_backend else "numba"

cover_dp = backend.cover_dp
is_associative = backend.is_associative
is_homomorphism = backend.is_homomorphism
subgroup_closure = backend.subgroup_closure
fiber_sizes = backend.fiber_sizes

__all__ = [
    "BACKEND_NAME",
    "backend",
    "cover_dp",
    "fiber_sizes",
    "is_associative",
    "is_homomorphism",
    "numba_backend",
    "numpy_backend",
    "subgroup_closure",
]
