"""Kernel backend selection.

Prefers the compiled extension, falls back to the numpy reference
implementation.  ``DASCGD_KERNELS=python`` forces the fallback,
``DASCGD_KERNELS=c`` makes a missing extension a hard error (useful in CI
and in the backend benchmark).  Both backends are bit-identical.
"""

import os

from . import _ref

_requested = os.environ.get("DASCGD_KERNELS", "").lower()

if _requested in ("", "c"):
    try:
        from . import _core as _impl

        BACKEND = "c"
    except ImportError:
        if _requested == "c":
            raise
        _impl = _ref
        BACKEND = "python"
elif _requested == "python":
    _impl = _ref
    BACKEND = "python"
else:
    raise ValueError(f"DASCGD_KERNELS must be 'c' or 'python', got {_requested!r}")

rl_inner_eval = _impl.rl_inner_eval
quantize_values = _impl.quantize_values
