"""Builds the optional compiled kernel; the package works without it."""
import os

import numpy
from setuptools import Extension, setup

ext = []
if os.environ.get("TPQRKIT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = cythonize(
            [Extension("tpqrkit.critpath._kernel", ["src/tpqrkit/critpath/_kernel.pyx"],
                       include_dirs=[numpy.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext)
