"""Build script for the optional compiled gradient-descent kernel.

The package works without the extension (a NumPy fallback is selected at
import time); building it just makes factor-model training faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "reqrank._kernels._gdc",
                ["src/reqrank/_kernels/_gdc.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
