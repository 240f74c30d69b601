"""Build script: compiles the optional inner-loop extension.

If Cython (or a C compiler) is unavailable the package still installs; the
pure-numpy kernel backend is selected at import time instead.
"""
from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "mtprior.kernels._core",
                sources=["src/mtprior/kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
