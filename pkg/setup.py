"""Build script: compiles the optional simplex pivot kernel.

The package is pure Python plus one optional Cython extension
(leakgames._kernel).  If Cython or a C compiler is unavailable the
extension is skipped and the package falls back to the numpy kernel at
import time.
"""

from setuptools import Extension, setup


def extension_modules():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "leakgames._kernel",
        ["src/leakgames/_kernel.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    try:
        return cythonize([ext], language_level=3)
    except Exception:
        return []


setup(ext_modules=extension_modules())
