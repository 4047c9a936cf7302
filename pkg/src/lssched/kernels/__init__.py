"""Steiner-search kernel selection.

The compiled extension is used when present; the pure-Python reference
otherwise. Set LSSCHED_PURE=1 to force the reference implementation.
Both expose the same find_tree / best_fit contract and produce
identical results (this is tested), so backend choice only affects
speed, never schedules.
"""

import os

from . import reference

if os.environ.get("LSSCHED_PURE"):
    _impl = reference
else:
    try:
        from . import _gridtree as _impl
    except ImportError:
        _impl = reference

BACKEND = _impl.BACKEND
FOUND = reference.FOUND
NO_TREE = reference.NO_TREE
PRUNED = reference.PRUNED

find_tree = _impl.find_tree
best_fit = _impl.best_fit


def get_backend(name: str):
    """Explicit backend lookup for benchmarks/tests: 'python' or 'compiled'."""
    if name == "python":
        return reference
    if name == "compiled":
        from . import _gridtree

        return _gridtree
    raise ValueError(f"unknown kernel backend {name!r}")
