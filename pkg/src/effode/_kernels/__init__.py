"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the
fallback. ``EFFODE_BACKEND=python`` or ``EFFODE_BACKEND=cython`` forces a
backend (the latter raises if the extension was not built). ``BACKEND``
names the active one.
"""

import os

_forced = os.environ.get("EFFODE_BACKEND", "").strip().lower()

if _forced == "python":
    from effode._kernels._rk4_py import affine_field, rk4_affine

    BACKEND = "python"
elif _forced == "cython":
    from effode._kernels._rk4 import affine_field, rk4_affine

    BACKEND = "cython"
else:
    try:
        from effode._kernels._rk4 import affine_field, rk4_affine

        BACKEND = "cython"
    except ImportError:
        from effode._kernels._rk4_py import affine_field, rk4_affine

        BACKEND = "python"

__all__ = ["BACKEND", "affine_field", "rk4_affine"]
