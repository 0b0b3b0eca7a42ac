"""Gradient-descent kernel selection.

The compiled kernel is used when the extension was built; otherwise the
NumPy fallback takes over with identical semantics. Set ``REQRANK_KERNEL``
to ``python`` or ``compiled`` to force a backend.
"""

from __future__ import annotations

import os

from . import gd_numpy
from .gd_numpy import (  # re-exported for callers and tests
    STATUS_CONVERGED,
    STATUS_DIVERGED,
    STATUS_MAX_ITER,
    cost_and_gradients,
)

try:
    from . import _gdc
except ImportError:
    _gdc = None

_forced = os.environ.get("REQRANK_KERNEL", "").lower()
if _forced == "python":
    _active = gd_numpy
elif _forced == "compiled":
    if _gdc is None:
        raise ImportError("REQRANK_KERNEL=compiled but the extension is not built")
    _active = _gdc
else:
    _active = _gdc if _gdc is not None else gd_numpy

BACKEND = "compiled" if _active is _gdc and _gdc is not None else "python"
run_gd = _active.run_gd


def available_backends() -> dict[str, object]:
    """Backend name -> module, for the benchmark and parity tests."""
    backends: dict[str, object] = {"python": gd_numpy}
    if _gdc is not None:
        backends["compiled"] = _gdc
    return backends
