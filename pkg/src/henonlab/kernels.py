"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
module is the fallback. Both expose the same functions and return
bit-identical results (asserted in the test suite), so nothing above
this module cares which one is active.
"""

from __future__ import annotations


def load_backend(name: str):
    """Explicit backend fetch: 'compiled', 'python', or 'auto'."""
    if name == "python":
        from . import _kernels_py

        return _kernels_py
    if name == "compiled":
        from . import _fastkernels

        return _fastkernels
    if name == "auto":
        try:
            from . import _fastkernels

            return _fastkernels
        except ImportError:
            from . import _kernels_py

            return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


_impl = load_backend("auto")

BACKEND: str = _impl.BACKEND
green_escape = _impl.green_escape
modp_next_table = _impl.modp_next_table
