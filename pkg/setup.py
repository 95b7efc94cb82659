"""Build script: compiles the native attention kernels when Cython and a C
compiler are available.  The package works without them (pure-numpy fallback
in longdiff._kernels.pyref); the compiled module only makes the hot loops
faster.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "longdiff._native",
                ["src/longdiff/_native.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
