"""Select the compiled time loop when available.

Set ``THRESHFLUX_BACKEND=python`` to force the NumPy implementation.
"""

import os

from . import _fvpython

BACKEND = "python"
advance = _fvpython.advance

if os.environ.get("THRESHFLUX_BACKEND", "").lower() != "python":
    try:
        from . import _fvkernel
    except ImportError:  # extension not built
        pass
    else:
        advance = _fvkernel.advance
        BACKEND = "cython"
