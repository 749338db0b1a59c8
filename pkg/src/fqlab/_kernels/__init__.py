"""Kernel backend selection.

The compiled extension is preferred when importable; the pure
NumPy/Python implementation is the fallback.  Set FQLAB_PURE_KERNELS=1
to force the fallback.  Both backends are engineered to produce
bit-identical results (shared precomputed float tables, matching
accumulation order, FP contraction disabled in the compiled build).
"""

from __future__ import annotations

import os

from . import pure

_cored = None
if os.environ.get("FQLAB_PURE_KERNELS", "") in ("", "0"):
    try:
        from . import _core as _cored
    except ImportError:
        _cored = None

impl = _cored if _cored is not None else pure
BACKEND = "compiled" if _cored is not None else "pure"

scan_additive = impl.scan_additive
decode_cosets = impl.decode_cosets
anneal_additive = impl.anneal_additive


def backend() -> str:
    return BACKEND


def available_backends() -> dict:
    """Name -> module for every importable backend (used by the benchmark)."""
    out = {"pure": pure}
    try:
        from . import _core
        out["compiled"] = _core
    except ImportError:
        pass
    return out
