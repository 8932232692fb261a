"""Build the optional Cython kernels.

The package works without them: ``lulc.kernels`` falls back to the numpy
implementation when the extension cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("LULC_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "lulc._ckernels",
                    ["src/lulc/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # keep float results bit-identical to the numpy path
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
