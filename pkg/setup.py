"""Build the optional compiled kernels.

The Cython extension is optional: when it cannot be built the package falls
back to ``germcat._kernels_py`` at import time.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("GERMCAT_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "germcat._ckernels",
                    ["src/germcat/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
