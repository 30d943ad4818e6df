"""Pick the kernel implementation at import time.

The compiled extension is preferred.  Setting ``RESULTLAB_BACKEND=python``
forces the pure-Python fallback, which is also used automatically when the
extension was not built.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels


def _load_compiled() -> ModuleType | None:
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()


def available_backends() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_kernels(name: str | None = None) -> ModuleType:
    """Return the kernel module called ``name`` ("compiled" or "python").

    With ``name=None`` the environment variable ``RESULTLAB_BACKEND`` decides,
    defaulting to the compiled module when it exists.
    """
    if name is None:
        name = os.environ.get("RESULTLAB_BACKEND", "").strip().lower() or None
    if name == "python":
        return _pykernels
    if name in (None, "compiled"):
        if _compiled is not None:
            return _compiled
        if name == "compiled":
            raise ImportError("compiled kernels are not built")
        return _pykernels
    raise ValueError(f"unknown backend {name!r}")


kernels = get_kernels()
BACKEND = kernels.BACKEND_NAME
