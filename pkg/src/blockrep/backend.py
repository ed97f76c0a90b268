"""Kernel backend selection.

The BLOCKREP_BACKEND environment variable picks the implementation of the
hot kernels at import time:

    auto   (default) numba if importable, else the numpy fallback
    numba  require the compiled kernels, fail if numba is missing
    numpy  force the pure numpy / python fallback

Both backends produce bit-identical results; only speed differs.
"""

from __future__ import annotations

import os
from types import ModuleType

ENV_VAR = "BLOCKREP_BACKEND"


def load_backend(choice: str | None = None) -> tuple[str, ModuleType]:
    """Resolve a backend name ('auto'/'numba'/'numpy') to a kernel module."""
    if choice is None:
        choice = os.environ.get(ENV_VAR, "auto")
    choice = choice.strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"unknown backend {choice!r} (expected auto, numba, or numpy)"
        )
    if choice in ("auto", "numba"):
        try:
            from . import _kernels_numba as impl

            return "numba", impl
        except ImportError:
            if choice == "numba":
                raise
    from . import _kernels_numpy as impl

    return "numpy", impl


ACTIVE_BACKEND, _impl = load_backend()

suffix_array = _impl.suffix_array
lcp_array = _impl.lcp_array
repeat_classes = _impl.repeat_classes
shuffle_codes = _impl.shuffle_codes
power_diff_int64 = _impl.power_diff_int64
warmup = _impl.warmup
