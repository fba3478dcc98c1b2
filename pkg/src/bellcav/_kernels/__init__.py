"""Time-stepping kernels with import-time backend selection.

The compiled extension is used when available; set BELLCAV_BACKEND=py
to force the pure-numpy fallback (useful for benchmarking and for
source installs without a compiler).  Both backends implement the same
contracts and the test suite checks their step-for-step agreement.
"""

import os

_requested = os.environ.get("BELLCAV_BACKEND", "").strip().lower()

if _requested in ("py", "python", "pure"):
    from . import pure as _impl
    BACKEND = "pure"
elif _requested in ("c", "compiled", "ext"):
    from . import _stepping as _impl  # raises if the extension is missing
    BACKEND = "compiled"
else:
    try:
        from . import _stepping as _impl
        BACKEND = "compiled"
    except ImportError:
        from . import pure as _impl
        BACKEND = "pure"

propagate_steps = _impl.propagate_steps
rk4_steps = _impl.rk4_steps

__all__ = ["BACKEND", "propagate_steps", "rk4_steps"]
