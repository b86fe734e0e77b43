"""Selects the compiled core or the pure-numpy fallback at import time.

Set ``VIRTSRC_PURE_PYTHON=1`` to force the fallback.
"""
import os

core = None
HAVE_COMPILED = False

if os.environ.get("VIRTSRC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as core  # type: ignore[no-redef]

        HAVE_COMPILED = True
    except ImportError:
        core = None


def get_ops(pure: bool = False):
    """Module providing ``hankel01``, ``kernel_matrices``, ``thomas_factor``, ``thomas_solve``."""
    if HAVE_COMPILED and not pure:
        return core
    from . import _purepy

    return _purepy
