"""Build script: compiles the optional counting-kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time); set PUSTAT_NO_EXT=1 to skip compilation.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PUSTAT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "pustat._core",
                    ["src/pustat/_core.pyx"],
                    include_dirs=[np.get_include()],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
