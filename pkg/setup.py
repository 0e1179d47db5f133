import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; the package falls back at import
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("MOEAD_AMR_NO_EXT"):
    ext_modules = cythonize(
        Extension(
            "moead_amr._kernels",
            ["src/moead_amr/_kernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            # keep sin/cos as separate libm calls (no sincos fusion) so results
            # match the pure-Python kernels bit for bit
            extra_compile_args=["-fno-builtin"] if os.name == "posix" else [],
        ),
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
