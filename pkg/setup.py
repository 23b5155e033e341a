"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so the extension is marked optional: a failed
compile degrades the install instead of breaking it.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    kernel = Extension(
        "rtdeph._kernels._core",
        sources=["src/rtdeph/_kernels/_core.pyx"],
        optional=True,
    )
    ext_modules = cythonize([kernel], language_level=3)

setup(ext_modules=ext_modules)
