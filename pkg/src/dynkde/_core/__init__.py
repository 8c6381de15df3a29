"""Numerical core: compiled extension with a pure-Python fallback.

The compiled ``_speedups`` extension is preferred.  Set the environment
variable ``DYNKDE_BACKEND=python`` before import to force the fallback
(used by the backend-agreement tests and the benchmark).
"""

import os

from . import fallback

if os.environ.get("DYNKDE_BACKEND", "").lower() == "python":
    backend = fallback
    BACKEND_NAME = "python"
else:
    try:
        from . import _speedups as backend

        BACKEND_NAME = "cython"
    except ImportError:
        backend = fallback
        BACKEND_NAME = "python"

__all__ = ["backend", "fallback", "BACKEND_NAME"]
