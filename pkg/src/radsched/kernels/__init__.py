"""Kernel backend selection.

The compiled extension (_fast, Cython) is used when it imported cleanly; the
pure-Python module is the fallback and the behavioural reference. Both
produce bit-identical outputs. Set RADSCHED_PURE_PYTHON=1 to force the
fallback (used by the equivalence tests and the kernel benchmark).
"""

import os

from . import pure as _pure

if os.environ.get("RADSCHED_PURE_PYTHON"):
    _impl = _pure
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
decode_population = _impl.decode_population
ffo_sweep = _impl.ffo_sweep


def available_backends():
    """Names of importable backends (compiled first when present)."""
    try:
        from . import _fast  # noqa: F401
    except ImportError:
        return ("pure",)
    return ("compiled", "pure")


def get_backend(name: str):
    """Fetch a backend module by name ('compiled' or 'pure')."""
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _fast
        return _fast
    raise ValueError(f"unknown kernel backend {name!r}")
