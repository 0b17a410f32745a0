"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a NumPy/pure-Python fallback is
selected at import time), so any build failure here degrades gracefully
rather than blocking installation.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("POWERSUM_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "powersum._core",
                    sources=["src/powersum/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
