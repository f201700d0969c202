"""Kernel backend selection.

``FUITBENCH_BACKEND`` picks the implementation of the hot conv/pool loops:

* ``numba`` — jitted loops (the default when numba imports cleanly),
* ``numpy`` — pure-numpy im2col fallback,
* ``auto`` / unset — numba if available, else numpy.

Both backends share one interface and agree to floating-point roundoff;
``benchmarks/bench_kernels.py`` compares their throughput.
"""

from __future__ import annotations

import os

from . import kernels_numpy

_VALID = ("auto", "numba", "numpy")


def _resolve_backend() -> str:
    choice = os.environ.get("FUITBENCH_BACKEND", "auto").lower()
    if choice not in _VALID:
        raise ValueError(f"FUITBENCH_BACKEND must be one of {_VALID}, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    try:
        from . import kernels_numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


ACTIVE_BACKEND = _resolve_backend()

if ACTIVE_BACKEND == "numba":
    from .kernels_numba import conv2d_backward, conv2d_forward, maxpool_backward, maxpool_forward
else:
    from .kernels_numpy import conv2d_backward, conv2d_forward, maxpool_backward, maxpool_forward

__all__ = [
    "ACTIVE_BACKEND",
    "conv2d_forward",
    "conv2d_backward",
    "maxpool_forward",
    "maxpool_backward",
    "kernels_numpy",
]
