"""Backend selection for the closed-set enumeration kernel.

The compiled extension is used when it imports; set ``WEYLKS_PURE_PYTHON=1``
to force the pure-Python reference implementation.
"""

from __future__ import annotations

import os

from ._search_py import closed_sets as closed_sets_py

try:
    from ._search_c import closed_sets as closed_sets_c
except ImportError:  # extension not built
    closed_sets_c = None


def default_backend() -> str:
    if closed_sets_c is None or os.environ.get("WEYLKS_PURE_PYTHON", "") not in ("", "0"):
        return "python"
    return "cython"


BACKEND = default_backend()


def get_kernel(name: str | None = None):
    name = name or default_backend()
    if name == "python":
        return closed_sets_py, "python"
    if name == "cython":
        if closed_sets_c is None:
            raise ImportError("the compiled search kernel is not built")
        return closed_sets_c, "cython"
    raise ValueError(f"unknown backend {name!r}")
