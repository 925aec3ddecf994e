"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the fallback
when the extension is missing or ``SAGIN_PURE_PYTHON`` is set to a true value.
``BACKEND`` names the active implementation.
"""

import os

from . import _kernels_py as python_backend

if os.environ.get("SAGIN_PURE_PYTHON", "").lower() in ("1", "true", "yes"):
    compiled_backend = None
else:
    try:
        from . import _kernels as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend or python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"

mie_sums = _active.mie_sums
vvw_line_sum = _active.vvw_line_sum
