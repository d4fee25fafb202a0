"""Kernel implementation selection.

Prefers the Cython-compiled twin of the step kernel when it was built;
falls back to the pure-Python module otherwise.  SNAPFWD_PURE=1 forces the
pure kernel (used by the benchmark to compare both)."""

import os

from snapfwd import _kernel as _pure

kernel = _pure
COMPILED = False

if os.environ.get("SNAPFWD_PURE") != "1":
    try:
        from snapfwd import _kernel_c as _compiled

        # A leftover .py twin without the built extension is not a speedup.
        if not _compiled.__file__.endswith(".py"):
            kernel = _compiled
            COMPILED = True
    except ImportError:
        pass
