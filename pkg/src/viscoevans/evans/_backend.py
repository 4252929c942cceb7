"""Pick the kernel implementation once, at import.

``VISCOEVANS_BACKEND=python`` forces the pure-Python kernels; otherwise the
compiled extension is used when it imports cleanly.
"""

from __future__ import annotations

import importlib
import os

from . import _kernels_py


def load(name: str | None = None):
    choice = (name or os.environ.get("VISCOEVANS_BACKEND", "auto")).strip().lower()
    if choice == "python":
        return _kernels_py
    try:
        return importlib.import_module("viscoevans.evans._kernels")
    except ImportError:
        if choice == "compiled":
            raise
        return _kernels_py


kernels = load()
