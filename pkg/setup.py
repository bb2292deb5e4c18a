import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "deepfork.kernels._ckernels",
                ["src/deepfork/kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    # The package still works without the compiled kernels: deepfork.kernels
    # falls back to the pure-Python implementation at import time.
    extensions = []

setup(ext_modules=extensions)
