"""Build the optional Cython kernels.

The package works without them; ``specialk.kernels`` falls back to numpy
when ``specialk._kernels`` cannot be imported.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("SPECIALK_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "specialk._kernels",
                    sources=["src/specialk/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
