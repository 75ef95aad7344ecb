"""Build script: compiles the optional Cython kernel.

The package works without the extension (a pure-Python engine is selected at
import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/misere/_engine/_kernel.pyx",
        language_level=3,
        annotate=False,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
