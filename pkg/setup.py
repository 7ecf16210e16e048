"""Build script for the optional MPFR QR kernel.

The extension is marked optional: when Cython, a C compiler or the MPFR
headers are missing the package installs without it and falls back to the
pure-Python kernel at import time.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "toeplitz_spectra._kernels._qr_c",
                ["src/toeplitz_spectra/_kernels/_qr_c.pyx"],
                libraries=["mpfr", "gmp"],
                extra_compile_args=["-O2"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
