"""Build script: compiles the optional stepping-kernel extension.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time), so any failure here downgrades
to a source-only install instead of aborting.
"""

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "bellcav._kernels._stepping",
                ["src/bellcav/_kernels/_stepping.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception:  # no Cython / no compiler: ship pure-python only
    ext_modules = []

setup(ext_modules=ext_modules)
