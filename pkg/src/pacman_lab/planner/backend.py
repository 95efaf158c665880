"""Search-backend selection: compiled kernel when built, pure Python otherwise.

Set ``PACMAN_LAB_PURE=1`` to force the pure backend (used by the benchmark and
by the backend-equivalence tests). The compiled kernel encodes its tie-break
mask in 64 bits, so horizons above 64 always route to the pure implementation.
"""

import os

from . import _search_py

_COMPILED = None
if not os.environ.get("PACMAN_LAB_PURE"):
    try:
        from . import _search as _COMPILED  # type: ignore[no-redef]
    except ImportError:
        _COMPILED = None


def active_backend() -> str:
    """Name of the search backend selected at import: compiled or pure-python."""
    return "compiled" if _COMPILED is not None else "pure-python"


def find_act_flags(nxt, s0, goal, k):
    if _COMPILED is not None and k <= 64:
        flags = _COMPILED.find_act_flags(nxt, s0, goal, k)
        return None if flags is None else [int(f) for f in flags]
    return _search_py.find_act_flags(nxt, s0, goal, k)
