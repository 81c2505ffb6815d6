"""Weight-space kernels: compiled extension when available, numpy otherwise.

Set ``VMRANK_PURE_PYTHON=1`` to force the numpy implementation.
"""
import os

from . import _pykernels as pure

compiled = None
if not os.environ.get("VMRANK_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

BACKENDS = {"python": pure}
if compiled is not None:
    BACKENDS["cython"] = compiled

BACKEND = "cython" if compiled is not None else "python"


def get_backend(name=None):
    """Return the kernel module ``name`` (default: the active backend)."""
    name = BACKEND if name is None else name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available (have {sorted(BACKENDS)})") from None
