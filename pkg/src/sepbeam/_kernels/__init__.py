"""Hot-kernel backend selection.

The compiled extension is preferred when importable; set
``SEPBEAM_BACKEND=numpy`` to force the pure-numpy fallback (or
``SEPBEAM_BACKEND=compiled`` to require the extension and fail loudly if it
is missing). The active choice is exposed as ``BACKEND``.
"""

from __future__ import annotations

import os

from . import _python

try:
    from . import _compiled
except ImportError:
    _compiled = None

_requested = os.environ.get("SEPBEAM_BACKEND", "").strip().lower()
if _requested in ("numpy", "python"):
    _active = _python
elif _requested == "compiled":
    if _compiled is None:
        raise ImportError(
            "SEPBEAM_BACKEND=compiled but the compiled extension is not built"
        )
    _active = _compiled
elif _requested:
    raise ImportError(f"unknown SEPBEAM_BACKEND value: {_requested!r}")
else:
    _active = _compiled if _compiled is not None else _python

BACKEND: str = "compiled" if _active is _compiled and _compiled is not None else "numpy"

sample_second_order = _active.sample_second_order
cofiltered_second_order = _active.cofiltered_second_order
bilinear_output = _active.bilinear_output
af_grid_full = _active.af_grid_full
af_grid_separable = _active.af_grid_separable

__all__ = [
    "BACKEND",
    "sample_second_order",
    "cofiltered_second_order",
    "bilinear_output",
    "af_grid_full",
    "af_grid_separable",
]
