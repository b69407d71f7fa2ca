"""Select the kernel backend at import time.

The compiled ``_kernels`` extension is used when it was built; otherwise, or
when ``MUBVERIFY_PURE_PYTHON=1`` is set, the numpy fallback is used.
"""

import os

from . import _fallback

if os.environ.get("MUBVERIFY_PURE_PYTHON") == "1":
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _fallback

NAME = kernels.NAME
sample_outcomes = kernels.sample_outcomes
kl_divergence = kernels.kl_divergence
solve_y = kernels.solve_y


def available():
    """Every importable backend, by name."""
    found = {"python": _fallback}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["cython"] = _kernels
    return found
