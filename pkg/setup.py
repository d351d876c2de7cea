"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension: friabilis._backend
falls back to the NumPy implementation in friabilis._kernels_py when the
compiled module is absent.  The extension is marked optional so a missing
C compiler degrades the install instead of failing it.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    kernel_ext = Extension(
        "friabilis._kernels",
        ["src/friabilis/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    kernel_ext.optional = True
    ext_modules = cythonize([kernel_ext], language_level=3)

setup(ext_modules=ext_modules)
