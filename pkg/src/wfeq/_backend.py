"""Kernel backend selection.

The compiled extension `wfeq._kernels` is preferred when importable; the
pure-NumPy module `wfeq._kernels_py` is the fallback.  WFEQ_BACKEND forces
the choice: "compiled" (error if unavailable), "python", or "auto".
"""

from __future__ import annotations

import os

_requested = os.environ.get("WFEQ_BACKEND", "auto").strip().lower() or "auto"

if _requested in ("auto", "compiled", "c"):
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        if _requested != "auto":
            raise ImportError(
                "WFEQ_BACKEND requested the compiled kernels but the "
                "extension is not built; install with a C toolchain or use "
                "WFEQ_BACKEND=python"
            )
        from . import _kernels_py as kernels
elif _requested in ("python", "py", "pure"):
    from . import _kernels_py as kernels
else:
    raise ValueError(
        f"unknown WFEQ_BACKEND value {_requested!r}; "
        "expected 'auto', 'compiled', or 'python'"
    )

BACKEND_NAME = "compiled" if kernels.COMPILED else "python"

STATUS_CONVERGED = kernels.STATUS_CONVERGED
STATUS_MAX_STEPS = kernels.STATUS_MAX_STEPS
STATUS_ZERO_NORMALIZER = kernels.STATUS_ZERO_NORMALIZER
STATUS_NON_FINITE = kernels.STATUS_NON_FINITE
