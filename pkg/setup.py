"""Optional compiled build of the hot step kernel.

The kernel lives in src/snapfwd/_kernel.py and is valid plain Python.  When
Cython is available we compile a twin of it as snapfwd._kernel_c; the engine
module picks the compiled twin at import time when present.  Set
SNAPFWD_NO_EXT=1 to skip the extension build entirely.
"""

import os
import shutil

from setuptools import setup

ext_modules = []
if os.environ.get("SNAPFWD_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        src = os.path.join("src", "snapfwd", "_kernel.py")
        twin = os.path.join("src", "snapfwd", "_kernel_c.py")
        shutil.copyfile(src, twin)
        ext_modules = cythonize(
            [Extension("snapfwd._kernel_c", [twin])],
            language_level=3,
            quiet=True,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
