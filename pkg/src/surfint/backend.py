"""Kernel selection: compiled extension if present, pure Python otherwise.

Set ``SURFINT_PURE=1`` in the environment to force the pure-Python
kernels (used by the parity tests and the benchmark).
"""

import os

if os.environ.get("SURFINT_PURE"):
    from . import _fallback as _impl
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
        BACKEND = "c"
    except ImportError:
        from . import _fallback as _impl
        BACKEND = "python"

free_reduce = _impl.free_reduce
normal_form = _impl.normal_form
fold_gl2 = _impl.fold_gl2
trace_state = _impl.trace_state
