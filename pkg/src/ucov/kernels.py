"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting ``UCOV_PURE=1``
forces the numpy fallback (used by the benchmark and the agreement tests).
"""

from __future__ import annotations

import os

from . import _fallback

_NAMES = (
    "mat_mul",
    "mat_apply",
    "canon",
    "su3_frames",
    "classify_batch",
    "imag_vertices",
    "apply_big",
)


def _load():
    if os.environ.get("UCOV_PURE", "") not in ("", "0"):
        return _fallback, "numpy"
    try:
        from . import _kernels
    except ImportError:
        return _fallback, "numpy"
    return _kernels, "cython"


_impl, BACKEND = _load()

mat_mul = _impl.mat_mul
mat_apply = _impl.mat_apply
canon = _impl.canon
su3_frames = _impl.su3_frames
classify_batch = _impl.classify_batch
imag_vertices = _impl.imag_vertices
apply_big = _impl.apply_big
encode_keys = _fallback.encode_keys


def backend(name: str):
    """Return the kernel module for ``"numpy"`` or ``"cython"`` explicitly."""
    if name == "numpy":
        return _fallback
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
