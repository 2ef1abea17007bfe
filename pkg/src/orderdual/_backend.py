"""Select the flow kernel implementation at import time.

The compiled extension is used when it imported cleanly; setting
ORDERDUAL_BACKEND=python forces the pure-Python twin (the two are
bit-identical, so this only trades speed).
"""

import os

from . import _flowkern_py

_forced = os.environ.get("ORDERDUAL_BACKEND", "").strip().lower()

if _forced in ("python", "py"):
    kernel = _flowkern_py
elif _forced in ("compiled", "c", "cython"):
    from . import _flowkern as kernel  # noqa: F401  (raises if unavailable)
else:
    try:
        from . import _flowkern as kernel
    except ImportError:
        kernel = _flowkern_py

BACKEND = kernel.BACKEND


def both_kernels():
    """(name, module) pairs for every importable kernel, for parity tests
    and benchmarks."""
    out = [("python", _flowkern_py)]
    try:
        from . import _flowkern

        out.append(("compiled", _flowkern))
    except ImportError:
        pass
    return out
