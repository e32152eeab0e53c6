"""Build hook for the optional compiled edit-distance kernel.

The package works without the extension: plan2text.kernels falls back to
the pure-Python implementation when the compiled module is missing.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/plan2text/_kernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
