"""Build script: compiles the optional Cython kernels when a toolchain is present.

The package is fully functional without them (a pure-Python backend is
selected at import time); set INCENTIVES_NO_EXT=1 to skip the extension
build explicitly.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("INCENTIVES_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "incentives._core._speedups",
                    ["src/incentives/_core/_speedups.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
