"""Hot-kernel backend selection.

Prefers the compiled Cython extension; falls back to the NumPy reference
implementation when the extension is missing or ``RIOT_LAB_FORCE_PY=1``.
"""

from __future__ import annotations

import os

from . import numpy_ref

if os.environ.get("RIOT_LAB_FORCE_PY") == "1":
    _impl = numpy_ref
else:
    try:
        from . import _hotloops as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = numpy_ref

best_split = _impl.best_split
split_gain = _impl.split_gain
hampel = _impl.hampel
supercap_advance = _impl.supercap_advance


def backend_name() -> str:
    """Name of the kernel backend in use: ``"cython"`` or ``"numpy"``."""
    return _impl.BACKEND
