"""Build script for the optional Cython sampling kernel.

The package works without the extension (a numpy fallback is selected at
import time); the extension just makes batch trellis sampling faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        [
            Extension(
                "stylechain._kernels._sampling_cy",
                ["src/stylechain/_kernels/_sampling_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
