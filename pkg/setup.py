"""Build the optional Cython kernels.

The package works without them: ``regdeloc._accel`` falls back to the
pure-Python implementations when the extension cannot be imported.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("REGDELOC_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools.extension import Extension
    except ImportError:
        print("Cython/numpy unavailable; building pure-Python only", file=sys.stderr)
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "regdeloc._ckernels",
                    ["src/regdeloc/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
