"""Diffraction kernel dispatch: compiled extension when available, numpy otherwise.

Set ``WSA_PURE_PYTHON=1`` to force the pure backend (useful for benchmarking
and for verifying backend parity). ``backend_name()`` reports the selection.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("WSA_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _pure
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

bullington_loss = _impl.bullington_loss
rss_prefix_sweep = _impl.rss_prefix_sweep


def backend_name() -> str:
    return _impl.BACKEND
