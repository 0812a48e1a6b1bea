import os

from setuptools import setup

ext_modules = []
if not os.environ.get("REGDUAL_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/regdual/_kernels/_speed.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # Pure-Python fallback kernels are always available.
        ext_modules = []

setup(ext_modules=ext_modules)
