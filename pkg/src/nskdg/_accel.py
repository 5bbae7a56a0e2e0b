"""Assembly-backend selection.

``NSKDG_BACKEND`` picks the hot-kernel implementation:

* ``auto`` (default): numba-compiled kernels when numba imports, else numpy
* ``numba``: require the compiled kernels (ImportError if numba is missing)
* ``numpy``: force the vectorized pure-numpy kernels

Both backends implement the same kernel signatures and are cross-checked in
the test suite; ``benchmarks/bench_kernels.py`` times them against each other.
"""

from __future__ import annotations

import os

_choice = os.environ.get("NSKDG_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"NSKDG_BACKEND must be one of auto|numba|numpy, got {_choice!r}")

HAVE_NUMBA = False
if _choice in ("auto", "numba"):
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise

BACKEND = "numba" if HAVE_NUMBA else "numpy"
