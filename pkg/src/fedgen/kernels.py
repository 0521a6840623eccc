"""Backend selection for the SGD kernels.

The compiled extension is preferred when it imports cleanly; the pure-Python
twin is used otherwise.  ``FEDGEN_BACKEND=python`` or ``FEDGEN_BACKEND=c``
forces a specific backend (the latter raises if the extension is missing).
Both backends produce bit-identical results.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("FEDGEN_BACKEND", "auto").lower()

if _requested == "python":
    _impl = _kernels_py
elif _requested == "c":
    from . import _kernels_c as _impl  # type: ignore[no-redef]
else:
    try:
        from . import _kernels_c as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND

chain_location = _impl.chain_location
chain_ols = _impl.chain_ols
flsgd_location = _impl.flsgd_location
flsgd_ols = _impl.flsgd_ols


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _kernels_c  # noqa: F401

        names.append("c")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Return the kernel module for `name` ("python" or "c")."""
    if name == "python":
        return _kernels_py
    if name == "c":
        from . import _kernels_c

        return _kernels_c
    raise ValueError(f"unknown backend {name!r}")
