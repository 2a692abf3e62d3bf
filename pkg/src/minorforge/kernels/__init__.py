"""Kernel backend selection.

The hot reduction loops run either through numba-jitted kernels or a
pure-numpy fallback with identical semantics.  Selection is driven by the
``MINORFORGE_KERNELS`` environment variable:

* ``auto`` (default): numba when importable, else numpy
* ``numba``: require the jitted backend, raise if numba is unavailable
* ``numpy``: force the fallback

``benchmarks/bench_kernels.py`` compares the two on identical workloads.
"""

from __future__ import annotations

import os

_choice = os.environ.get("MINORFORGE_KERNELS", "auto").strip().lower()

if _choice in ("auto", "numba"):
    try:
        from . import numba_backend as _impl
    except ImportError:
        if _choice == "numba":
            raise
        from . import numpy_backend as _impl
elif _choice == "numpy":
    from . import numpy_backend as _impl
else:
    raise ValueError(
        f"MINORFORGE_KERNELS={_choice!r}: expected 'auto', 'numba' or 'numpy'"
    )

BACKEND = _impl.BACKEND_NAME

sort_terms = _impl.sort_terms
merge_scaled = _impl.merge_scaled
normal_form = _impl.normal_form
normal_form_trace = _impl.normal_form_trace
modinv = _impl.modinv
