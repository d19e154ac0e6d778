"""Build the optional compiled kernels.

The package works without them: ``galcasimir.kernels`` falls back to the
pure-Python implementation when ``_ckernels`` cannot be imported.  Set
``GALCASIMIR_NO_EXT=1`` to skip the extension build.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("GALCASIMIR_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "galcasimir._ckernels",
                    ["src/galcasimir/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
            },
        )

setup(ext_modules=ext_modules)
