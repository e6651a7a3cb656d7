"""Kernel backend selection.

The compiled extension is preferred when present; the pure-Python module is
a drop-in replacement with identical semantics and accumulation order.  Set
RESONATOR_LAB_PURE=1 to force the pure backend (useful for benchmarking).
"""

import os

from . import pykernels

_impl = pykernels
if os.environ.get("RESONATOR_LAB_PURE") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

BACKEND = _impl.BACKEND
spf_sieve = _impl.spf_sieve
dlog_table = _impl.dlog_table
weight_table = _impl.weight_table
smooth_enumerate = _impl.smooth_enumerate
smooth_reduce = _impl.smooth_reduce


def available_backends():
    """Names of importable kernel backends."""
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return the kernel module for ``name`` ('python' or 'cython')."""
    if name == "python":
        return pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
