"""Hot-kernel backend selection.

``BICAP_BACKEND`` picks the implementation: "numba" (default when importable),
"numpy" (pure fallback), or "auto".  Both share exact call contracts, so the
choice only affects speed; `benchmarks/bench_backends.py` measures the gap.
"""

from __future__ import annotations

import os

_requested = os.environ.get("BICAP_BACKEND", "auto").strip().lower()

if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"BICAP_BACKEND must be auto|numba|numpy, got {_requested!r}")

if _requested == "numpy":
    from . import _kern_numpy as _impl
else:
    try:
        from . import _kern_numba as _impl
    except ImportError:
        if _requested == "numba":
            raise
        from . import _kern_numpy as _impl

lap3d = _impl.lap3d
grad_energy3d = _impl.grad_energy3d


def backend_name() -> str:
    return _impl.NAME


def thread_count() -> int:
    """Worker-pool width for layer jobs; bounded by BICAP_THREADS."""
    env = os.environ.get("BICAP_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("BICAP_THREADS must be >= 1")
        return n
    return min(4, os.cpu_count() or 1)
